"""Document indexing: a tf-idf inverted index over stemmed body text,
plus concept annotation that maps documents onto ontology classes.

Term weight is raw term frequency times ln(doc_count / document
frequency), so a term present in every document weighs zero.  Concept
annotation matches class labels and synonyms against the stemmed token
stream with a longest-match scan; each match consumes its tokens and
adds one to the document's strength for every class behind the matched
key.  Matches never cross sentence boundaries.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .ontology import Ontology
from .stemmer import stem
from .textprep import (
    StopWordList,
    default_stopwords,
    preprocess,
    remove_stopwords,
    tokenize,
)
from .webcorpus.store import Document

__all__ = [
    "EmptyCorpus",
    "InvertedIndex",
    "Lexicon",
    "ConceptIndex",
    "build_inverted_index",
    "build_lexicon",
    "annotate",
    "build_concept_index",
]

FORMAT = 1


class EmptyCorpus(Exception):
    pass


@dataclass
class InvertedIndex:
    doc_count: int
    doc_ids: tuple[str, ...]
    postings: dict[str, dict[str, int]]  # term -> doc_id -> raw tf
    norms: dict[str, float] = field(init=False, repr=False)

    def __post_init__(self):
        weights: dict[str, float] = {doc_id: 0.0 for doc_id in self.doc_ids}
        for term in self.postings:
            idf = self.idf(term)
            for doc_id, tf in self.postings[term].items():
                weights[doc_id] += (tf * idf) ** 2
        self.norms = {doc_id: math.sqrt(v) for doc_id, v in weights.items()}

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log(self.doc_count / df) if df else 0.0

    def weight(self, term: str, doc_id: str) -> float:
        tf = self.postings.get(term, {}).get(doc_id, 0)
        return tf * self.idf(term)

    def norm(self, doc_id: str) -> float:
        return self.norms[doc_id]

    @property
    def vocabulary(self) -> list[str]:
        return sorted(self.postings)

    def to_json(self) -> str:
        payload = {
            "format": FORMAT,
            "doc_count": self.doc_count,
            "doc_ids": list(self.doc_ids),
            "postings": self.postings,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "InvertedIndex":
        payload = json.loads(text)
        if payload.get("format") != FORMAT:
            raise ValueError(f"unsupported index format {payload.get('format')!r}")
        return cls(
            doc_count=payload["doc_count"],
            doc_ids=tuple(payload["doc_ids"]),
            postings={
                term: dict(rows) for term, rows in payload["postings"].items()
            },
        )

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "InvertedIndex":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def build_inverted_index(
    corpus: Iterable[Document], stoplist: StopWordList | None = None
) -> InvertedIndex:
    stoplist = stoplist or default_stopwords()
    documents = list(corpus)
    if not documents:
        raise EmptyCorpus("cannot index an empty corpus")
    seen = {d.doc_id for d in documents}
    if len(seen) != len(documents):
        raise ValueError("duplicate doc_id in corpus")
    postings: dict[str, dict[str, int]] = {}
    for doc in documents:
        for term in preprocess(doc.body, stoplist).stems:
            rows = postings.setdefault(term, {})
            rows[doc.doc_id] = rows.get(doc.doc_id, 0) + 1
    return InvertedIndex(
        doc_count=len(documents),
        doc_ids=tuple(sorted(seen)),
        postings=postings,
    )


# -- concept annotation -------------------------------------------------------

@dataclass(frozen=True)
class Lexicon:
    """Stemmed surface forms of class labels and synonyms.  Keys are
    space-joined stem sequences; values are the classes they evoke."""

    entries: dict[str, tuple[str, ...]]  # stemmed key -> sorted class IRIs
    max_words: int

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def classes_for(self, key: str) -> tuple[str, ...]:
        return self.entries.get(key, ())


def _phrase_key(phrase: str, stoplist: StopWordList) -> str:
    tokens = remove_stopwords(tokenize(phrase), stoplist)
    stems = [stem(t) for t in tokens]
    return " ".join(s for s in stems if s not in stoplist)


def build_lexicon(ont: Ontology, stoplist: StopWordList | None = None) -> Lexicon:
    stoplist = stoplist or default_stopwords()
    collected: dict[str, set[str]] = {}
    for cls in ont.classes.values():
        for phrase in (cls.label, *cls.synonyms):
            key = _phrase_key(phrase, stoplist)
            if key:
                collected.setdefault(key, set()).add(cls.iri)
    entries = {key: tuple(sorted(iris)) for key, iris in collected.items()}
    max_words = max((key.count(" ") + 1 for key in entries), default=0)
    return Lexicon(entries=entries, max_words=max_words)


def _sentence_stems(doc: Document, stoplist: StopWordList) -> list[list[str]]:
    pre = preprocess(doc.body, stoplist)
    out = []
    for sentence_tokens in pre.tokens:
        kept = remove_stopwords(sentence_tokens, stoplist)
        stems = [stem(t) for t in kept]
        out.append([s for s in stems if s not in stoplist])
    return out


def annotate(
    corpus: Iterable[Document],
    lexicon: Lexicon,
    stoplist: StopWordList | None = None,
) -> dict[str, dict[str, int]]:
    """Per-document concept strengths: doc_id -> class IRI -> match count."""
    stoplist = stoplist or default_stopwords()
    annotations: dict[str, dict[str, int]] = {}
    for doc in corpus:
        strengths: dict[str, int] = {}
        for stems in _sentence_stems(doc, stoplist):
            for iri in scan_concepts(stems, lexicon):
                strengths[iri] = strengths.get(iri, 0) + 1
        annotations[doc.doc_id] = strengths
    return annotations


def scan_concepts(stems: list[str], lexicon: Lexicon) -> list[str]:
    """Longest-match scan over one stem sequence.  Returns one class IRI
    per match occurrence (so repeats accumulate), in scan order."""
    hits: list[str] = []
    i = 0
    while i < len(stems):
        matched = 0
        for length in range(min(lexicon.max_words, len(stems) - i), 0, -1):
            key = " ".join(stems[i : i + length])
            if key in lexicon:
                hits.extend(lexicon.classes_for(key))
                matched = length
                break
        i += matched if matched else 1
    return hits


@dataclass
class ConceptIndex:
    """Concept postings plus the lexicon that produced them, so query
    text can be mapped onto the same keys at search time."""

    lexicon: Lexicon
    postings: dict[str, tuple[tuple[str, int], ...]]  # iri -> ((doc_id, strength),)

    def docs_for(self, iri: str) -> tuple[tuple[str, int], ...]:
        return self.postings.get(iri, ())

    def to_json(self) -> str:
        payload = {
            "format": FORMAT,
            "lexicon": {
                "entries": {k: list(v) for k, v in self.lexicon.entries.items()},
                "max_words": self.lexicon.max_words,
            },
            "postings": {
                iri: [[doc_id, strength] for doc_id, strength in rows]
                for iri, rows in self.postings.items()
            },
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ConceptIndex":
        payload = json.loads(text)
        if payload.get("format") != FORMAT:
            raise ValueError(f"unsupported index format {payload.get('format')!r}")
        lexicon = Lexicon(
            entries={
                k: tuple(v) for k, v in payload["lexicon"]["entries"].items()
            },
            max_words=payload["lexicon"]["max_words"],
        )
        postings = {
            iri: tuple((doc_id, strength) for doc_id, strength in rows)
            for iri, rows in payload["postings"].items()
        }
        return cls(lexicon=lexicon, postings=postings)

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "ConceptIndex":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def build_concept_index(
    annotations: dict[str, dict[str, int]], lexicon: Lexicon
) -> ConceptIndex:
    rows: dict[str, list[tuple[str, int]]] = {}
    for doc_id in annotations:
        for iri, strength in annotations[doc_id].items():
            rows.setdefault(iri, []).append((doc_id, strength))
    postings = {
        iri: tuple(sorted(pairs, key=lambda p: (-p[1], p[0])))
        for iri, pairs in rows.items()
    }
    return ConceptIndex(lexicon=lexicon, postings=postings)
