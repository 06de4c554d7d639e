"""Pipeline orchestration tests: staging, manifests, staleness,
determinism, and crash behavior.  All runs use the bundled fixture web,
so nothing touches the network."""
import json
from pathlib import Path

import pytest

from ontosearch.pipeline import (
    ArtifactMismatch,
    CONCEPT_INDEX,
    CRAWL_LOG,
    HIERARCHY,
    INVERTED_INDEX,
    MissingUpstream,
    ONTOLOGY_NT,
    CORPUS_MANIFEST,
    PipelineConfig,
    StaleArtifacts,
    STAGES,
    load_classification,
    load_engine,
    read_manifest,
    run_all,
    run_stage,
    status,
)
from ontosearch.webcorpus.crawl import read_crawl_log
from ontosearch.webcorpus.fetch import FetchError, FixtureFetcher

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
TRACKED = (
    CRAWL_LOG,
    CORPUS_MANIFEST,
    ONTOLOGY_NT,
    HIERARCHY,
    INVERTED_INDEX,
    CONCEPT_INDEX,
)


def _config(artifacts_dir: Path) -> PipelineConfig:
    return PipelineConfig.from_toml(
        FIXTURES / "pipeline.toml", {"artifacts_dir": artifacts_dir}
    )


@pytest.fixture(scope="module")
def built(tmp_path_factory) -> Path:
    artifacts = tmp_path_factory.mktemp("artifacts")
    run_all(_config(artifacts))
    return artifacts


def test_run_all_builds_every_tracked_artifact(built):
    for name in TRACKED:
        assert (built / name).exists(), name
    report = status(built)
    assert {v["state"] for v in report.values()} == {"fresh"}


def test_raw_page_cache_is_written(built):
    raw = built / "raw"
    assert (raw / "index.json").exists()
    index = json.loads((raw / "index.json").read_text())
    assert len(index) == 20


def test_turtle_export_is_written(built):
    text = (built / "ontology.ttl").read_text()
    assert "@prefix owl:" in text


def test_crawl_log_covers_fixture_web(built):
    records = read_crawl_log(built / CRAWL_LOG)
    fetched = [r for r in records if r.status == "fetched"]
    failed = [r for r in records if r.status == "failed"]
    skipped = [r for r in records if r.status == "skipped"]
    assert len(fetched) == 20
    assert [r.url for r in failed] == ["http://health.example/archived.html"]
    assert [r.url for r in skipped] == ["http://foreign.example/mosquito.html"]


def test_fixture_runs_get_deterministic_timestamps(built):
    records = read_crawl_log(built / CRAWL_LOG)
    stamps = [r.fetched_at for r in records if r.status == "fetched"]
    assert stamps[0] == 1.0
    assert all(b > a for a, b in zip(stamps, stamps[1:]))
    assert all(s == int(s) for s in stamps)


def test_two_runs_produce_identical_artifact_bytes(tmp_path):
    first = tmp_path / "one"
    second = tmp_path / "two"
    run_all(_config(first))
    run_all(_config(second))
    for name in TRACKED:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_manifest_records_hash_per_artifact(built):
    manifest = read_manifest(built)
    assert set(manifest["artifacts"]) == set(TRACKED)
    for entry in manifest["artifacts"].values():
        assert len(entry["sha256"]) == 64
        assert entry["stale"] is False


def test_rerunning_a_stage_marks_downstream_stale(tmp_path):
    config = _config(tmp_path)
    run_all(config)
    run_stage(config, "ontology")
    report = status(tmp_path)
    assert report[ONTOLOGY_NT]["state"] == "fresh"
    assert report[HIERARCHY]["state"] == "stale"
    assert report[INVERTED_INDEX]["state"] == "stale"
    assert report[CONCEPT_INDEX]["state"] == "stale"
    assert report[CRAWL_LOG]["state"] == "fresh"  # not downstream of ontology
    run_stage(config, "classify")
    run_stage(config, "index")
    assert {v["state"] for v in status(tmp_path).values()} == {"fresh"}


def test_stage_without_upstream_is_rejected(tmp_path):
    config = _config(tmp_path)
    with pytest.raises(MissingUpstream):
        run_stage(config, "corpus")
    with pytest.raises(MissingUpstream):
        run_stage(config, "index")


def test_unknown_stage_name_is_rejected(tmp_path):
    with pytest.raises(ValueError, match="unknown stage"):
        run_stage(_config(tmp_path), "deploy")


def test_status_reports_missing_before_any_run(tmp_path):
    report = status(tmp_path)
    assert {v["state"] for v in report.values()} == {"missing"}


def test_tampering_is_detected(tmp_path):
    config = _config(tmp_path)
    run_all(config)
    path = tmp_path / INVERTED_INDEX
    path.write_text(path.read_text().replace("2", "3", 1))
    assert status(tmp_path)[INVERTED_INDEX]["state"] == "modified"
    with pytest.raises(ArtifactMismatch):
        load_engine(tmp_path)


def test_loading_stale_artifacts_is_refused(tmp_path):
    config = _config(tmp_path)
    run_all(config)
    run_stage(config, "ontology")  # downstream now stale
    with pytest.raises(StaleArtifacts):
        load_engine(tmp_path)


def test_loading_unbuilt_artifacts_is_refused(tmp_path):
    with pytest.raises(MissingUpstream):
        load_engine(tmp_path)


def test_load_classification_needs_only_ontology_stages(tmp_path):
    config = _config(tmp_path)
    run_stage(config, "ontology")
    run_stage(config, "classify")
    hierarchy, ont = load_classification(tmp_path)
    base = ont.base_iri
    assert hierarchy.depth(f"{base}#Migraine", f"{base}#Symptom") == 3
    assert len(ont.classes) == 40


def test_loaded_engine_answers_queries(built):
    engine = load_engine(built)
    result = engine.search("fever", mode="semantic")
    pages = [engine.docs[h.doc_id].url.rsplit("/", 1)[-1] for h in result.hits]
    assert pages == ["dengue.html", "typhoid.html"]


class _FlakyFetcher:
    """Delegates to the fixture web but blows up on the sixth fetch."""

    def __init__(self, inner: FixtureFetcher):
        self.inner = inner
        self.calls = 0

    def fetch(self, url: str):
        self.calls += 1
        if self.calls == 6:
            raise RuntimeError("socket wedged")
        return self.inner.fetch(url)


def test_crash_mid_crawl_leaves_no_partial_artifacts(tmp_path):
    config = _config(tmp_path)
    fetcher = _FlakyFetcher(FixtureFetcher.from_dir(config.fixture_web))
    with pytest.raises(RuntimeError):
        run_all(config, fetcher=fetcher)
    assert not (tmp_path / CRAWL_LOG).exists()
    assert read_manifest(tmp_path)["artifacts"] == {}
    # a later clean run recovers fully
    run_all(_config(tmp_path))
    assert {v["state"] for v in status(tmp_path).values()} == {"fresh"}


def test_fetch_errors_inside_crawl_are_tolerated(tmp_path):
    # network-style failures on non-seed pages degrade to failed records
    config = _config(tmp_path)

    class _Spotty:
        def __init__(self, inner):
            self.inner = inner

        def fetch(self, url):
            if url.endswith("cough.html"):
                raise FetchError("connection reset")
            return self.inner.fetch(url)

    run_stage(config, "crawl", fetcher=_Spotty(FixtureFetcher.from_dir(config.fixture_web)))
    records = read_crawl_log(tmp_path / CRAWL_LOG)
    failures = {r.url for r in records if r.status == "failed"}
    assert "http://health.example/cough.html" in failures


def test_config_resolves_paths_relative_to_toml(tmp_path):
    config = PipelineConfig.from_toml(FIXTURES / "pipeline.toml")
    assert config.ontology_source == FIXTURES / "health.ont"
    assert config.fixture_web == FIXTURES / "web"
    assert config.artifacts_dir == FIXTURES / "artifacts"
    assert config.seeds == ("http://health.example/index.html",)
    assert config.worker_count == 4


def test_config_overrides_win(tmp_path):
    config = PipelineConfig.from_toml(
        FIXTURES / "pipeline.toml",
        {"artifacts_dir": tmp_path, "worker_count": 2},
    )
    assert config.artifacts_dir == tmp_path
    assert config.worker_count == 2


def test_stage_list_is_ordered_for_a_full_build():
    assert STAGES == ("crawl", "corpus", "ontology", "classify", "index")
