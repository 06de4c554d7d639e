"""Breadth-first crawler over a deduplicating frontier.

The frontier is processed one depth level at a time: the next level is
assembled sequentially (so scheduling order never depends on worker
timing), then the level's pages are fetched by a worker pool.  This
keeps the visited URL set and the record order identical for any
worker_count.
"""
from __future__ import annotations

import hashlib
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable
from urllib.parse import urlsplit

from .fetch import FetchError, Fetcher, FetchResult
from .urls import MalformedUrl, extract_links, normalize_url

__all__ = [
    "CrawlConfig",
    "CrawlRecord",
    "LinkGraph",
    "NoSeedsReachable",
    "crawl",
    "write_crawl_log",
    "read_crawl_log",
]


@dataclass(frozen=True)
class CrawlConfig:
    seeds: tuple[str, ...]
    max_depth: int = 2
    max_pages: int = 1000
    allowed_hosts: tuple[str, ...] = ()  # empty means: the hosts of the seeds
    politeness_delay_ms: int = 0
    worker_count: int = 1

    def validate(self) -> None:
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        for seed in self.seeds:
            parts = urlsplit(seed)
            if not parts.scheme or not parts.netloc:
                raise ValueError(f"seed is not an absolute url: {seed!r}")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.max_pages < 1:
            raise ValueError("max_pages must be >= 1")
        if self.politeness_delay_ms < 0:
            raise ValueError("politeness_delay_ms must be >= 0")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


@dataclass(frozen=True)
class CrawlRecord:
    url: str
    depth: int
    parent: str | None
    status: str  # fetched | failed | skipped
    content_hash: str  # sha256 of body for fetched pages, else ""
    fetched_at: float


@dataclass
class LinkGraph:
    nodes: set[str] = field(default_factory=set)
    edges: set[tuple[str, str]] = field(default_factory=set)

    def add_edge(self, src: str, dst: str) -> None:
        self.nodes.add(src)
        self.nodes.add(dst)
        self.edges.add((src, dst))


class NoSeedsReachable(Exception):
    """Every seed fetch failed; carries the failure records."""

    def __init__(self, records: list[CrawlRecord]):
        super().__init__("no seed could be fetched")
        self.records = records


@dataclass(frozen=True)
class _Task:
    url: str
    depth: int
    parent: str | None


class _PolitenessGate:
    """Serializes fetches per host and enforces a minimum gap between
    consecutive fetch starts on the same host."""

    def __init__(self, delay_ms: int):
        self._delay_s = delay_ms / 1000.0
        self._locks: dict[str, threading.Lock] = {}
        self._last_start: dict[str, float] = {}
        self._registry = threading.Lock()

    def _host_lock(self, host: str) -> threading.Lock:
        with self._registry:
            return self._locks.setdefault(host, threading.Lock())

    def fetch(self, fetcher: Fetcher, url: str) -> FetchResult:
        if self._delay_s <= 0:
            return fetcher.fetch(url)
        host = urlsplit(url).netloc
        with self._host_lock(host):
            last = self._last_start.get(host)
            if last is not None:
                wait = last + self._delay_s - time.monotonic()
                if wait > 0:
                    time.sleep(wait)
            self._last_start[host] = time.monotonic()
            return fetcher.fetch(url)


def crawl(
    config: CrawlConfig,
    fetcher: Fetcher,
    clock: Callable[[], float] | None = None,
) -> tuple[LinkGraph, list[CrawlRecord]]:
    """Breadth-first crawl from the seeds.

    Every canonical URL is fetched at most once; max_pages caps fetch
    attempts (successes and failures both count); links to hosts outside
    the allowlist are recorded as `skipped` and never fetched.  `clock`
    supplies the fetched_at stamps (defaults to wall time); it is called
    in deterministic record order, so an injected counter makes the whole
    record list reproducible.
    """
    config.validate()
    if clock is None:
        clock = time.time

    seeds = []
    for raw in config.seeds:
        url = normalize_url(raw)
        if url not in seeds:
            seeds.append(url)
    allowed = set(config.allowed_hosts) or {urlsplit(u).netloc for u in seeds}

    gate = _PolitenessGate(config.politeness_delay_ms)
    graph = LinkGraph()
    records: list[CrawlRecord] = []
    scheduled: set[str] = set(seeds)
    skipped_seen: set[str] = set()
    budget = config.max_pages

    level = [_Task(url, 0, None) for url in seeds]
    for url in seeds:
        graph.nodes.add(url)

    pool = ThreadPoolExecutor(max_workers=config.worker_count)
    try:
        any_seed_fetched = False
        depth = 0
        while level and budget > 0:
            if len(level) > budget:
                level = level[:budget]
            budget -= len(level)

            def _run(task: _Task) -> FetchResult | FetchError:
                try:
                    return gate.fetch(fetcher, task.url)
                except FetchError as exc:
                    return exc

            results = list(pool.map(_run, level))

            next_level: list[_Task] = []
            for task, result in zip(level, results):
                if isinstance(result, FetchError) or not (
                    200 <= result.status < 300
                ):
                    records.append(
                        CrawlRecord(task.url, task.depth, task.parent,
                                    "failed", "", clock())
                    )
                    continue
                digest = hashlib.sha256(result.body).hexdigest()
                records.append(
                    CrawlRecord(task.url, task.depth, task.parent,
                                "fetched", digest, clock())
                )
                if task.depth == 0:
                    any_seed_fetched = True
                if "html" not in result.content_type:
                    continue
                for link in extract_links(result.body, task.url):
                    graph.add_edge(task.url, link)
                    if task.depth + 1 > config.max_depth:
                        continue
                    host = urlsplit(link).netloc
                    if host not in allowed:
                        if link not in scheduled and link not in skipped_seen:
                            skipped_seen.add(link)
                            records.append(
                                CrawlRecord(link, task.depth + 1, task.url,
                                            "skipped", "", clock())
                            )
                        continue
                    if link not in scheduled:
                        scheduled.add(link)
                        next_level.append(_Task(link, task.depth + 1, task.url))

            if depth == 0 and not any_seed_fetched:
                raise NoSeedsReachable(records)
            level = next_level
            depth += 1
    finally:
        pool.shutdown(wait=True)

    return graph, records


def write_crawl_log(records: list[CrawlRecord], path: str | Path) -> None:
    lines = []
    for r in records:
        lines.append(
            json.dumps(
                {
                    "url": r.url,
                    "depth": r.depth,
                    "parent": r.parent,
                    "status": r.status,
                    "content_hash": r.content_hash,
                    "fetched_at": r.fetched_at,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_crawl_log(path: str | Path) -> list[CrawlRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        records.append(
            CrawlRecord(
                url=row["url"],
                depth=row["depth"],
                parent=row["parent"],
                status=row["status"],
                content_hash=row["content_hash"],
                fetched_at=row["fetched_at"],
            )
        )
    return records
