"""Seeded breadth-first crawling, HTML text extraction, and corpus storage."""

from .urls import MalformedUrl, extract_links, normalize_url
from .htmltext import extract_text
from .fetch import FetchError, FetchResult, Fetcher, FixtureFetcher, UrllibFetcher
from .crawl import (
    CrawlConfig,
    CrawlRecord,
    LinkGraph,
    NoSeedsReachable,
    crawl,
    read_crawl_log,
    write_crawl_log,
)
from .store import Document, IoFailure, load_corpus, make_doc_id, store_corpus

__all__ = [
    "MalformedUrl",
    "extract_links",
    "normalize_url",
    "extract_text",
    "FetchError",
    "FetchResult",
    "Fetcher",
    "FixtureFetcher",
    "UrllibFetcher",
    "CrawlConfig",
    "CrawlRecord",
    "LinkGraph",
    "NoSeedsReachable",
    "crawl",
    "read_crawl_log",
    "write_crawl_log",
    "Document",
    "IoFailure",
    "load_corpus",
    "make_doc_id",
    "store_corpus",
]
