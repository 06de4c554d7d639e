"""Plain-text corpus storage: one .txt per document plus a JSON-lines manifest."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

__all__ = ["Document", "IoFailure", "make_doc_id", "store_corpus", "load_corpus"]

MANIFEST_NAME = "corpus_manifest.jsonl"


class IoFailure(Exception):
    def __init__(self, path: Path, cause: Exception):
        super().__init__(f"{path}: {cause}")
        self.path = Path(path)


@dataclass(frozen=True)
class Document:
    doc_id: str
    url: str
    title: str
    body: str


def make_doc_id(canonical_url: str) -> str:
    """First 16 hex chars of sha256 of the canonical URL; stable across runs."""
    return hashlib.sha256(canonical_url.encode("utf-8")).hexdigest()[:16]


def store_corpus(documents: list[Document], directory: str | Path) -> list[dict]:
    """Write one UTF-8 `<doc_id>.txt` per document plus the manifest.

    Returns the manifest rows.  Rewriting the same corpus produces
    byte-identical files.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(directory, exc) from exc
    rows = []
    for doc in documents:
        name = f"{doc.doc_id}.txt"
        path = directory / name
        try:
            path.write_text(doc.body, encoding="utf-8")
        except OSError as exc:
            raise IoFailure(path, exc) from exc
        rows.append({"doc_id": doc.doc_id, "url": doc.url, "title": doc.title,
                     "path": name})
    manifest = directory / MANIFEST_NAME
    payload = "".join(
        json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n" for row in rows
    )
    try:
        manifest.write_text(payload, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(manifest, exc) from exc
    return rows


def load_corpus(directory: str | Path) -> list[Document]:
    directory = Path(directory)
    manifest = directory / MANIFEST_NAME
    try:
        text = manifest.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(manifest, exc) from exc
    documents = []
    for line in text.splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        path = directory / row["path"]
        try:
            body = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(path, exc) from exc
        documents.append(
            Document(doc_id=row["doc_id"], url=row["url"], title=row["title"],
                     body=body)
        )
    return documents
