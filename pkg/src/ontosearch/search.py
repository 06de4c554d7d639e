"""Query-time search over the built artifacts.

Two retrieval modes share one corpus:

* keyword: cosine similarity between tf-idf vectors of the query and
  each document.
* semantic: query text is mapped onto ontology classes, each class is
  expanded downward through the subsumption closure, and documents are
  scored by annotation strength discounted by subclass depth
  (strength / (1 + depth)).  Cosine similarity acts only as a small
  tie-break (weight 0.01), and a query that touches no class at all
  falls back to plain keyword ranking.

All rankings order by (-score, doc_id), so results are reproducible
byte for byte.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .indexer import ConceptIndex, InvertedIndex, scan_concepts
from .ontology import Ontology
from .reasoner import InferredHierarchy
from .stemmer import stem
from .textprep import (
    StopWordList,
    default_stopwords,
    remove_stopwords,
    segment_sentences,
    tokenize,
)
from .webcorpus.store import Document

__all__ = [
    "ConceptMatch",
    "SearchHit",
    "SearchResult",
    "SearchEngine",
    "Judgment",
    "QueryEval",
    "EvalReport",
    "UnknownDocId",
    "keyword_search",
    "semantic_search",
    "match_concepts",
    "evaluate",
    "read_judgments",
    "result_to_json",
]

TIE_BREAK_WEIGHT = 0.01
SNIPPET_LENGTH = 160


class UnknownDocId(Exception):
    pass


@dataclass(frozen=True)
class ConceptMatch:
    iri: str
    label: str
    via: str  # "direct" or "subclass-expansion"
    depth: int
    strength: int


@dataclass(frozen=True)
class SearchHit:
    doc_id: str
    score: float
    url: str
    title: str
    snippet: str
    concepts: tuple[ConceptMatch, ...] = ()


@dataclass(frozen=True)
class SearchResult:
    query: str
    mode: str  # "keyword" or "semantic"
    fallback: bool  # semantic query matched no concept, ranked by keyword
    hits: tuple[SearchHit, ...]


def _query_stems(query: str, stoplist: StopWordList) -> list[str]:
    kept = remove_stopwords(tokenize(query), stoplist)
    stems = [stem(t) for t in kept]
    return [s for s in stems if s not in stoplist]


def _cosine_scores(index: InvertedIndex, stems: list[str]) -> dict[str, float]:
    counts = Counter(stems)
    weights = {
        term: tf * index.idf(term)
        for term, tf in counts.items()
        if index.idf(term) > 0.0
    }
    query_norm = math.sqrt(sum(w * w for w in weights.values()))
    if query_norm == 0.0:
        return {}
    dots: dict[str, float] = {}
    for term in sorted(weights):
        idf = index.idf(term)
        for doc_id, tf in index.postings[term].items():
            dots[doc_id] = dots.get(doc_id, 0.0) + weights[term] * (tf * idf)
    return {
        doc_id: dot / (query_norm * index.norm(doc_id))
        for doc_id, dot in dots.items()
        if dot > 0.0
    }


def _snippet(doc: Document, evidence: set[str]) -> str:
    for sentence in segment_sentences(doc.body):
        sentence_stems = {stem(t) for t in tokenize(sentence)}
        if sentence_stems & evidence:
            return sentence.strip()
    return doc.body[:SNIPPET_LENGTH].strip()


def keyword_search(
    query: str,
    *,
    index: InvertedIndex,
    docs: dict[str, Document],
    stoplist: StopWordList | None = None,
    k: int = 10,
) -> SearchResult:
    stoplist = stoplist or default_stopwords()
    stems = _query_stems(query, stoplist)
    scores = _cosine_scores(index, stems)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))[:k]
    evidence = set(stems)
    hits = tuple(
        SearchHit(
            doc_id=doc_id,
            score=score,
            url=docs[doc_id].url,
            title=docs[doc_id].title,
            snippet=_snippet(docs[doc_id], evidence),
        )
        for doc_id, score in ranked
    )
    return SearchResult(query=query, mode="keyword", fallback=False, hits=hits)


def match_concepts(
    query: str,
    concept_index: ConceptIndex,
    stoplist: StopWordList | None = None,
) -> dict[str, int]:
    """Class IRIs evoked by the query text, with occurrence counts."""
    stoplist = stoplist or default_stopwords()
    stems = _query_stems(query, stoplist)
    counts: dict[str, int] = {}
    for iri in scan_concepts(stems, concept_index.lexicon):
        counts[iri] = counts.get(iri, 0) + 1
    return counts


def _expansion(
    concept: str, hierarchy: InferredHierarchy
) -> list[tuple[str, int]]:
    """All classes subsumed by the concept, with their subclass depth."""
    if not hierarchy.knows(concept):
        return [(concept, 0)]
    pairs = []
    for sub in hierarchy.subclasses_of(concept):
        depth = hierarchy.depth(sub, concept)
        if depth is not None:
            pairs.append((sub, depth))
    return sorted(pairs, key=lambda p: (p[1], p[0]))


def semantic_search(
    query: str,
    *,
    index: InvertedIndex,
    concept_index: ConceptIndex,
    hierarchy: InferredHierarchy,
    ontology: Ontology,
    docs: dict[str, Document],
    stoplist: StopWordList | None = None,
    k: int = 10,
) -> SearchResult:
    stoplist = stoplist or default_stopwords()
    query_concepts = match_concepts(query, concept_index, stoplist)
    if not query_concepts:
        fallback = keyword_search(
            query, index=index, docs=docs, stoplist=stoplist, k=k
        )
        return SearchResult(
            query=query, mode="semantic", fallback=True, hits=fallback.hits
        )

    concept_scores: dict[str, float] = {}
    doc_matches: dict[str, dict[str, tuple[str, int, int]]] = {}
    for concept in sorted(query_concepts):
        for expanded, depth in _expansion(concept, hierarchy):
            via = "direct" if depth == 0 else "subclass-expansion"
            for doc_id, strength in concept_index.docs_for(expanded):
                contribution = strength / (1 + depth)
                concept_scores[doc_id] = concept_scores.get(doc_id, 0.0) + contribution
                best = doc_matches.setdefault(doc_id, {})
                prior = best.get(expanded)
                if prior is None or depth < prior[1]:
                    best[expanded] = (via, depth, strength)

    cosine = _cosine_scores(index, _query_stems(query, stoplist))
    scored = {
        doc_id: concept_scores[doc_id] + TIE_BREAK_WEIGHT * cosine.get(doc_id, 0.0)
        for doc_id in concept_scores
    }
    ranked = sorted(scored.items(), key=lambda item: (-item[1], item[0]))[:k]

    label_of = {iri: cls.label for iri, cls in ontology.classes.items()}
    iri_stems: dict[str, set[str]] = {}
    for key, iris in concept_index.lexicon.entries.items():
        for iri in iris:
            iri_stems.setdefault(iri, set()).update(key.split(" "))

    hits = []
    for doc_id, score in ranked:
        matches = tuple(
            ConceptMatch(
                iri=iri,
                label=label_of.get(iri, iri),
                via=via,
                depth=depth,
                strength=strength,
            )
            for iri, (via, depth, strength) in sorted(doc_matches[doc_id].items())
        )
        evidence = set().union(*(iri_stems.get(m.iri, set()) for m in matches))
        hits.append(
            SearchHit(
                doc_id=doc_id,
                score=score,
                url=docs[doc_id].url,
                title=docs[doc_id].title,
                snippet=_snippet(docs[doc_id], evidence),
                concepts=matches,
            )
        )
    return SearchResult(query=query, mode="semantic", fallback=False, hits=tuple(hits))


# -- one bundle for the CLI and HTTP server -----------------------------------

@dataclass
class SearchEngine:
    docs: dict[str, Document]
    index: InvertedIndex
    concept_index: ConceptIndex
    hierarchy: InferredHierarchy
    ontology: Ontology
    stoplist: StopWordList

    def search(self, query: str, mode: str = "semantic", k: int = 10) -> SearchResult:
        if mode == "keyword":
            return keyword_search(
                query, index=self.index, docs=self.docs, stoplist=self.stoplist, k=k
            )
        if mode == "semantic":
            return semantic_search(
                query,
                index=self.index,
                concept_index=self.concept_index,
                hierarchy=self.hierarchy,
                ontology=self.ontology,
                docs=self.docs,
                stoplist=self.stoplist,
                k=k,
            )
        raise ValueError(f"unknown search mode {mode!r}")


# -- evaluation ----------------------------------------------------------------

@dataclass(frozen=True)
class Judgment:
    query: str
    relevant: tuple[str, ...]


@dataclass(frozen=True)
class QueryEval:
    query: str
    retrieved: tuple[str, ...]
    relevant: tuple[str, ...]
    precision: float
    recall: float


@dataclass(frozen=True)
class EvalReport:
    mode: str
    k: int
    queries: tuple[QueryEval, ...]
    macro_precision: float
    macro_recall: float

    def to_json(self) -> str:
        payload = {
            "mode": self.mode,
            "k": self.k,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "queries": [
                {
                    "query": q.query,
                    "retrieved": list(q.retrieved),
                    "relevant": list(q.relevant),
                    "precision": q.precision,
                    "recall": q.recall,
                }
                for q in self.queries
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _precision_recall(
    retrieved: tuple[str, ...], relevant: frozenset[str]
) -> tuple[float, float]:
    # conventions for empty sets: an empty answer to an unanswerable
    # query is perfect; an empty answer to an answerable one scores zero
    overlap = len([d for d in retrieved if d in relevant])
    if retrieved:
        precision = overlap / len(retrieved)
    else:
        precision = 1.0 if not relevant else 0.0
    recall = overlap / len(relevant) if relevant else 1.0
    return precision, recall


def evaluate(
    engine: SearchEngine,
    judgments: list[Judgment],
    mode: str = "semantic",
    k: int = 10,
) -> EvalReport:
    if not judgments:
        raise ValueError("no judgments to evaluate")
    known = set(engine.docs)
    rows = []
    for judgment in judgments:
        unknown = [d for d in judgment.relevant if d not in known]
        if unknown:
            raise UnknownDocId(
                f"judgment {judgment.query!r} references unknown ids: {unknown}"
            )
        result = engine.search(judgment.query, mode=mode, k=k)
        retrieved = tuple(h.doc_id for h in result.hits)
        precision, recall = _precision_recall(retrieved, frozenset(judgment.relevant))
        rows.append(
            QueryEval(
                query=judgment.query,
                retrieved=retrieved,
                relevant=tuple(sorted(judgment.relevant)),
                precision=precision,
                recall=recall,
            )
        )
    macro_p = sum(r.precision for r in rows) / len(rows)
    macro_r = sum(r.recall for r in rows) / len(rows)
    return EvalReport(
        mode=mode,
        k=k,
        queries=tuple(rows),
        macro_precision=macro_p,
        macro_recall=macro_r,
    )


def read_judgments(path: Path) -> list[Judgment]:
    """One JSON object per line: {"query": "...", "relevant": ["id", ...]}."""
    judgments = []
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            judgments.append(
                Judgment(query=row["query"], relevant=tuple(sorted(row["relevant"])))
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"bad judgment on line {line_no}: {exc}") from exc
    return judgments


def result_to_json(result: SearchResult) -> str:
    payload = {
        "query": result.query,
        "mode": result.mode,
        "fallback": result.fallback,
        "hits": [
            {
                "doc_id": h.doc_id,
                "score": h.score,
                "url": h.url,
                "title": h.title,
                "snippet": h.snippet,
                "concepts": [
                    {
                        "iri": c.iri,
                        "label": c.label,
                        "via": c.via,
                        "depth": c.depth,
                        "strength": c.strength,
                    }
                    for c in h.concepts
                ],
            }
            for h in result.hits
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
