"""Text preprocessing applied identically to queries and document text.

Four stages run in a fixed order: sentence segmentation, tokenization,
stop-word removal, stemming.  All functions are pure.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .stemmer import stem

__all__ = [
    "StopWordList",
    "PreprocessedText",
    "segment_sentences",
    "tokenize",
    "remove_stopwords",
    "stem",
    "preprocess",
    "load_stopwords",
    "default_stopwords",
]

_TOKEN_RE = re.compile(r"[^\W_]+")
_BOUNDARY_RE = re.compile(r"([.!?]+)(\s+|$)")

# A '.' after one of these does not end a sentence.
_ABBREVIATIONS = frozenset({"dr", "mr", "e.g", "i.e"})


@dataclass(frozen=True)
class StopWordList:
    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class PreprocessedText:
    sentences: list[str]
    tokens: list[list[str]]  # one token list per sentence
    stems: list[str]


def load_stopwords(path: str | Path) -> StopWordList:
    """Read a stop-word file: UTF-8, one word per line, '#' comments and
    blank lines ignored.  Entries are lowercased."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return StopWordList(frozenset(words))


_DEFAULT: StopWordList | None = None


def default_stopwords() -> StopWordList:
    """The packaged default English list (~120 words)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = (resources.files("ontosearch") / "data" / "stopwords.txt").read_text(
            encoding="utf-8"
        )
        words = {
            line.strip().lower()
            for line in text.splitlines()
            if line.strip() and not line.strip().startswith("#")
        }
        _DEFAULT = StopWordList(frozenset(words))
    return _DEFAULT


def segment_sentences(raw: str) -> list[str]:
    """Split text on '.', '!' or '?' runs followed by whitespace or end,
    keeping the terminator with its sentence."""
    sentences = []
    start = 0
    for match in _BOUNDARY_RE.finditer(raw):
        before = raw[start : match.start(1)]
        chunks = before.split()
        last_word = chunks[-1].lower() if chunks else ""
        if match.group(1) == "." and last_word in _ABBREVIATIONS:
            continue
        piece = raw[start : match.end(1)].strip()
        if piece:
            sentences.append(piece)
        start = match.end()
    tail = raw[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize(sentence: str) -> list[str]:
    """Maximal alphanumeric runs, lowercased; punctuation discarded."""
    return [t.lower() for t in _TOKEN_RE.findall(sentence)]


def remove_stopwords(tokens: list[str], stoplist: StopWordList) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def preprocess(raw: str, stoplist: StopWordList) -> PreprocessedText:
    """segment -> tokenize -> remove stop words -> stem.

    Stems that land back in the stop list (e.g. "doing" -> "do") are
    dropped so the output never contains a stop word.
    """
    sentences = segment_sentences(raw)
    token_lists = [tokenize(s) for s in sentences]
    stems: list[str] = []
    for toks in token_lists:
        for tok in remove_stopwords(toks, stoplist):
            stemmed = stem(tok)
            if stemmed and stemmed not in stoplist:
                stems.append(stemmed)
    return PreprocessedText(sentences, token_lists, stems)
