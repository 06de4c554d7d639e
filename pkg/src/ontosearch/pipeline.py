"""Build orchestration: five stages that turn a seed list and an
ontology source file into query-ready artifacts.

    crawl     -> crawl_log.jsonl (+ raw/ page cache, untracked)
    corpus    -> corpus_manifest.jsonl and one text file per page
    ontology  -> ontology.nt (canonical) and ontology.ttl (readable)
    classify  -> hierarchy.json
    index     -> inverted_index.json, concept_index.json

manifest.json records a sha256 per tracked artifact.  Running a stage
re-hashes its outputs and marks every downstream artifact stale; loads
refuse stale or tampered artifacts so results always trace back to one
coherent build.  All files are written atomically (temp file + rename).
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .authoring import load_ontology
from .indexer import (
    annotate,
    build_concept_index,
    build_inverted_index,
    build_lexicon,
    ConceptIndex,
    InvertedIndex,
)
from .ontology import Ontology
from .rdfio import from_triples, parse_ntriples, to_triples, write_ntriples, write_turtle
from .reasoner import InferredHierarchy, classify
from .search import SearchEngine
from .textprep import default_stopwords, load_stopwords
from .webcorpus.crawl import CrawlConfig, crawl, read_crawl_log, write_crawl_log
from .webcorpus.fetch import Fetcher, FetchResult, FixtureFetcher, UrllibFetcher
from .webcorpus.htmltext import extract_text
from .webcorpus.store import Document, load_corpus, make_doc_id, store_corpus

__all__ = [
    "PipelineConfig",
    "PipelineError",
    "MissingUpstream",
    "StaleArtifacts",
    "ArtifactMismatch",
    "STAGES",
    "run_all",
    "run_stage",
    "status",
    "load_engine",
    "load_classification",
]

CRAWL_LOG = "crawl_log.jsonl"
CORPUS_MANIFEST = "corpus_manifest.jsonl"
ONTOLOGY_NT = "ontology.nt"
HIERARCHY = "hierarchy.json"
INVERTED_INDEX = "inverted_index.json"
CONCEPT_INDEX = "concept_index.json"
MANIFEST = "manifest.json"
RAW_DIR = "raw"

STAGES = ("crawl", "corpus", "ontology", "classify", "index")

_STAGE_DEPS = {
    "crawl": (),
    "corpus": ("crawl",),
    "ontology": (),
    "classify": ("ontology",),
    "index": ("corpus", "ontology", "classify"),
}

_STAGE_OUTPUTS = {
    "crawl": (CRAWL_LOG,),
    "corpus": (CORPUS_MANIFEST,),
    "ontology": (ONTOLOGY_NT,),
    "classify": (HIERARCHY,),
    "index": (INVERTED_INDEX, CONCEPT_INDEX),
}


class PipelineError(Exception):
    pass


class MissingUpstream(PipelineError):
    pass


class StaleArtifacts(PipelineError):
    pass


class ArtifactMismatch(PipelineError):
    pass


@dataclass
class PipelineConfig:
    seeds: tuple[str, ...]
    ontology_source: Path
    artifacts_dir: Path
    max_depth: int = 2
    max_pages: int = 1000
    allowed_hosts: tuple[str, ...] = ()
    politeness_delay_ms: int = 0
    worker_count: int = 1
    fixture_web: Path | None = None  # serve pages from disk instead of the network
    stopwords_path: Path | None = None

    @classmethod
    def from_toml(cls, path: str | Path, overrides: dict | None = None) -> "PipelineConfig":
        path = Path(path)
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
        base = path.parent

        def resolve(value: str) -> Path:
            p = Path(value)
            return p if p.is_absolute() else (base / p)

        crawl_cfg = raw.get("crawl", {})
        ontology_cfg = raw.get("ontology", {})
        artifacts_cfg = raw.get("artifacts", {})
        values = {
            "seeds": tuple(crawl_cfg.get("seeds", ())),
            "max_depth": crawl_cfg.get("max_depth", 2),
            "max_pages": crawl_cfg.get("max_pages", 1000),
            "allowed_hosts": tuple(crawl_cfg.get("allowed_hosts", ())),
            "politeness_delay_ms": crawl_cfg.get("politeness_delay_ms", 0),
            "worker_count": crawl_cfg.get("worker_count", 1),
            "fixture_web": (
                resolve(crawl_cfg["fixture_web"]) if "fixture_web" in crawl_cfg else None
            ),
            "ontology_source": resolve(ontology_cfg.get("source", "ontology.ont")),
            "artifacts_dir": resolve(artifacts_cfg.get("dir", "artifacts")),
            "stopwords_path": (
                resolve(artifacts_cfg["stopwords"]) if "stopwords" in artifacts_cfg else None
            ),
        }
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def crawl_config(self) -> CrawlConfig:
        return CrawlConfig(
            seeds=self.seeds,
            max_depth=self.max_depth,
            max_pages=self.max_pages,
            allowed_hosts=self.allowed_hosts,
            politeness_delay_ms=self.politeness_delay_ms,
            worker_count=self.worker_count,
        )

    def make_fetcher(self) -> Fetcher:
        if self.fixture_web is not None:
            return FixtureFetcher.from_dir(self.fixture_web)
        return UrllibFetcher()

    def stoplist(self):
        if self.stopwords_path is not None:
            return load_stopwords(self.stopwords_path)
        return default_stopwords()


# -- atomic file helpers -------------------------------------------------------

def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_manifest(artifacts_dir: Path) -> dict:
    path = Path(artifacts_dir) / MANIFEST
    if not path.exists():
        return {"format": 1, "artifacts": {}}
    return json.loads(path.read_text(encoding="utf-8"))


def _write_manifest(artifacts_dir: Path, manifest: dict) -> None:
    data = (json.dumps(manifest, sort_keys=True, indent=2) + "\n").encode("utf-8")
    _write_atomic(Path(artifacts_dir) / MANIFEST, data)


def _record_outputs(manifest: dict, artifacts_dir: Path, stage: str) -> None:
    for name in _STAGE_OUTPUTS[stage]:
        manifest["artifacts"][name] = {
            "stage": stage,
            "sha256": _sha256_file(Path(artifacts_dir) / name),
            "stale": False,
        }


def _downstream_of(stage: str) -> list[str]:
    out = []
    for candidate in STAGES:
        seen: set[str] = set()
        frontier = list(_STAGE_DEPS[candidate])
        while frontier:
            dep = frontier.pop()
            if dep in seen:
                continue
            seen.add(dep)
            frontier.extend(_STAGE_DEPS[dep])
        if stage in seen:
            out.append(candidate)
    return out


def _mark_stale(manifest: dict, stage: str) -> None:
    for downstream in _downstream_of(stage):
        for name in _STAGE_OUTPUTS[downstream]:
            entry = manifest["artifacts"].get(name)
            if entry is not None:
                entry["stale"] = True


# -- stage bodies ----------------------------------------------------------------

class _RecordingFetcher:
    """Captures every fetched body so the corpus stage can reuse the
    crawl's pages without hitting the fetcher twice."""

    def __init__(self, inner: Fetcher):
        self.inner = inner
        self.pages: dict[str, FetchResult] = {}

    def fetch(self, url: str) -> FetchResult:
        result = self.inner.fetch(url)
        self.pages[url] = result
        return result


def _stage_crawl(config: PipelineConfig, fetcher: Fetcher | None, clock) -> None:
    recording = _RecordingFetcher(fetcher or config.make_fetcher())
    if clock is None and config.fixture_web is not None:
        clock = _counter_clock()
    graph, records = crawl(config.crawl_config(), recording, clock=clock)
    raw_dir = config.artifacts_dir / RAW_DIR
    raw_index = {}
    for record in records:
        if record.status != "fetched":
            continue
        page = recording.pages.get(record.url)
        if page is None:
            continue
        name = make_doc_id(record.url) + ".bin"
        _write_atomic(raw_dir / name, page.body)
        raw_index[record.url] = {
            "file": name,
            "content_type": page.content_type,
            "status": page.status,
        }
    _write_atomic(
        raw_dir / "index.json",
        (json.dumps(raw_index, sort_keys=True, indent=2) + "\n").encode("utf-8"),
    )
    log_path = config.artifacts_dir / CRAWL_LOG
    tmp = log_path.with_name(log_path.name + ".part")
    write_crawl_log(records, tmp)
    os.replace(tmp, log_path)


def _counter_clock():
    state = {"now": 0.0}

    def tick() -> float:
        state["now"] += 1.0
        return state["now"]

    return tick


def _stage_corpus(config: PipelineConfig) -> None:
    records = read_crawl_log(config.artifacts_dir / CRAWL_LOG)
    raw_dir = config.artifacts_dir / RAW_DIR
    raw_index = json.loads((raw_dir / "index.json").read_text(encoding="utf-8"))
    documents = []
    for record in records:
        if record.status != "fetched":
            continue
        meta = raw_index.get(record.url)
        if meta is None or "html" not in meta["content_type"]:
            continue
        html = (raw_dir / meta["file"]).read_bytes()
        title, body = extract_text(html)
        documents.append(
            Document(
                doc_id=make_doc_id(record.url),
                url=record.url,
                title=title or record.url,
                body=body,
            )
        )
    store_corpus(documents, config.artifacts_dir)


def _stage_ontology(config: PipelineConfig) -> None:
    ont = load_ontology(config.ontology_source)
    graph = to_triples(ont)
    _write_atomic(config.artifacts_dir / ONTOLOGY_NT, write_ntriples(graph))
    _write_atomic(
        config.artifacts_dir / "ontology.ttl", write_turtle(graph, ont.base_iri)
    )


def _stage_classify(config: PipelineConfig) -> None:
    ont, _ = from_triples(
        parse_ntriples((config.artifacts_dir / ONTOLOGY_NT).read_bytes())
    )
    hierarchy = classify(ont)
    _write_atomic(
        config.artifacts_dir / HIERARCHY, hierarchy.to_json().encode("utf-8")
    )


def _stage_index(config: PipelineConfig) -> None:
    stoplist = config.stoplist()
    documents = load_corpus(config.artifacts_dir)
    ont, _ = from_triples(
        parse_ntriples((config.artifacts_dir / ONTOLOGY_NT).read_bytes())
    )
    index = build_inverted_index(documents, stoplist)
    lexicon = build_lexicon(ont, stoplist)
    concept_index = build_concept_index(annotate(documents, lexicon, stoplist), lexicon)
    _write_atomic(
        config.artifacts_dir / INVERTED_INDEX, index.to_json().encode("utf-8")
    )
    _write_atomic(
        config.artifacts_dir / CONCEPT_INDEX, concept_index.to_json().encode("utf-8")
    )


def _check_upstream(config: PipelineConfig, stage: str) -> None:
    for dep in _STAGE_DEPS[stage]:
        for name in _STAGE_OUTPUTS[dep]:
            if not (config.artifacts_dir / name).exists():
                raise MissingUpstream(
                    f"stage {stage!r} needs {name} from stage {dep!r}; "
                    f"run that stage first"
                )


def run_stage(
    config: PipelineConfig,
    stage: str,
    fetcher: Fetcher | None = None,
    clock=None,
) -> None:
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}; stages are {', '.join(STAGES)}")
    config.artifacts_dir.mkdir(parents=True, exist_ok=True)
    _check_upstream(config, stage)
    if stage == "crawl":
        _stage_crawl(config, fetcher, clock)
    elif stage == "corpus":
        _stage_corpus(config)
    elif stage == "ontology":
        _stage_ontology(config)
    elif stage == "classify":
        _stage_classify(config)
    else:
        _stage_index(config)
    manifest = read_manifest(config.artifacts_dir)
    _record_outputs(manifest, config.artifacts_dir, stage)
    _mark_stale(manifest, stage)
    _write_manifest(config.artifacts_dir, manifest)


def run_all(
    config: PipelineConfig, fetcher: Fetcher | None = None, clock=None
) -> None:
    shared = fetcher or (
        config.make_fetcher() if config.fixture_web is not None else None
    )
    for stage in STAGES:
        run_stage(config, stage, fetcher=shared, clock=clock)


def status(artifacts_dir: Path) -> dict:
    """Per-artifact state: present, stale, and whether the on-disk hash
    still matches the manifest."""
    artifacts_dir = Path(artifacts_dir)
    manifest = read_manifest(artifacts_dir)
    report = {}
    for stage in STAGES:
        for name in _STAGE_OUTPUTS[stage]:
            entry = manifest["artifacts"].get(name)
            path = artifacts_dir / name
            if not path.exists():
                report[name] = {"stage": stage, "state": "missing"}
                continue
            if entry is None:
                report[name] = {"stage": stage, "state": "untracked"}
                continue
            actual = _sha256_file(path)
            if actual != entry["sha256"]:
                state = "modified"
            elif entry.get("stale"):
                state = "stale"
            else:
                state = "fresh"
            report[name] = {"stage": stage, "state": state, "sha256": actual}
    return report


def _verified_read(artifacts_dir: Path, name: str) -> bytes:
    path = artifacts_dir / name
    manifest = read_manifest(artifacts_dir)
    entry = manifest["artifacts"].get(name)
    if entry is None or not path.exists():
        raise MissingUpstream(f"artifact {name} not built; run the pipeline first")
    data = path.read_bytes()
    if hashlib.sha256(data).hexdigest() != entry["sha256"]:
        raise ArtifactMismatch(
            f"{name} does not match the build manifest; rerun its stage"
        )
    if entry.get("stale"):
        raise StaleArtifacts(f"{name} is stale; rerun downstream stages")
    return data


def load_classification(
    artifacts_dir: str | Path,
) -> tuple[InferredHierarchy, Ontology]:
    artifacts_dir = Path(artifacts_dir)
    ont, _ = from_triples(parse_ntriples(_verified_read(artifacts_dir, ONTOLOGY_NT)))
    hierarchy = InferredHierarchy.from_json(
        _verified_read(artifacts_dir, HIERARCHY).decode("utf-8")
    )
    return hierarchy, ont


def load_engine(
    artifacts_dir: str | Path, stopwords_path: Path | None = None
) -> SearchEngine:
    artifacts_dir = Path(artifacts_dir)
    hierarchy, ont = load_classification(artifacts_dir)
    _verified_read(artifacts_dir, CORPUS_MANIFEST)
    documents = load_corpus(artifacts_dir)
    index = InvertedIndex.from_json(
        _verified_read(artifacts_dir, INVERTED_INDEX).decode("utf-8")
    )
    concept_index = ConceptIndex.from_json(
        _verified_read(artifacts_dir, CONCEPT_INDEX).decode("utf-8")
    )
    stoplist = (
        load_stopwords(stopwords_path) if stopwords_path else default_stopwords()
    )
    return SearchEngine(
        docs={d.doc_id: d for d in documents},
        index=index,
        concept_index=concept_index,
        hierarchy=hierarchy,
        ontology=ont,
        stoplist=stoplist,
    )
