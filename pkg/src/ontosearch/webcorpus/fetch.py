"""Fetcher implementations: a deterministic fixture fetcher for tests and
pipelines, and a live urllib fetcher (off by default everywhere)."""
from __future__ import annotations

import json
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

__all__ = ["FetchError", "FetchResult", "Fetcher", "FixtureFetcher", "UrllibFetcher"]


class FetchError(Exception):
    """Network-level failure (connection refused, timeout, DNS)."""


@dataclass(frozen=True)
class FetchResult:
    status: int
    content_type: str
    body: bytes


class Fetcher(Protocol):
    def fetch(self, url: str) -> FetchResult: ...


@dataclass
class FixtureFetcher:
    """Serves a fixed url -> page mapping; unknown urls get 404.

    Records per-host fetch start times (monotonic clock) so tests can
    check politeness gaps, and per-url call counts for dedup checks.
    """

    routes: dict[str, FetchResult]
    fetch_times: dict[str, list[float]] = field(default_factory=dict)
    fetch_counts: dict[str, int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def from_pages(cls, pages: dict[str, str | bytes]) -> "FixtureFetcher":
        routes = {}
        for url, body in pages.items():
            data = body.encode("utf-8") if isinstance(body, str) else body
            routes[url] = FetchResult(200, "text/html; charset=utf-8", data)
        return cls(routes)

    @classmethod
    def from_dir(cls, directory: str | Path) -> "FixtureFetcher":
        """Load a fixture web: directory of HTML files plus routes.json
        mapping url -> file name (or -> {"file": name, "status": code})."""
        directory = Path(directory)
        table = json.loads((directory / "routes.json").read_text(encoding="utf-8"))
        routes = {}
        for url, entry in table.items():
            if isinstance(entry, str):
                entry = {"file": entry}
            status = int(entry.get("status", 200))
            name = entry.get("file")
            body = (directory / name).read_bytes() if name else b""
            ctype = entry.get("content_type", "text/html; charset=utf-8")
            routes[url] = FetchResult(status, ctype, body)
        return cls(routes)

    def fetch(self, url: str) -> FetchResult:
        host = url.split("/", 3)[2] if "//" in url else url
        with self._lock:
            self.fetch_times.setdefault(host, []).append(time.monotonic())
            self.fetch_counts[url] = self.fetch_counts.get(url, 0) + 1
        result = self.routes.get(url)
        if result is None:
            return FetchResult(404, "text/html; charset=utf-8", b"")
        return result


@dataclass
class UrllibFetcher:
    timeout_s: float = 10.0
    user_agent: str = "ontosearch/0.1 (+https://ontosearch.example)"

    def fetch(self, url: str) -> FetchResult:
        request = urllib.request.Request(url, headers={"User-Agent": self.user_agent})
        try:
            with urllib.request.urlopen(request, timeout=self.timeout_s) as resp:
                ctype = resp.headers.get("Content-Type", "")
                return FetchResult(resp.status, ctype, resp.read())
        except urllib.error.HTTPError as exc:
            return FetchResult(exc.code, exc.headers.get("Content-Type", ""), b"")
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise FetchError(f"{url}: {exc}") from exc
