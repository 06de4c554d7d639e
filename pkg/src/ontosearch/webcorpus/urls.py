"""URL canonicalization and anchor-link extraction."""
from __future__ import annotations

from html.parser import HTMLParser
from urllib.parse import urljoin, urlsplit, urlunsplit

__all__ = ["MalformedUrl", "normalize_url", "extract_links"]

_DEFAULT_PORTS = {"http": "80", "https": "443"}


class MalformedUrl(ValueError):
    pass


def _remove_dot_segments(path: str) -> str:
    # RFC 3986 section 5.2.4
    output: list[str] = []
    for segment in path.split("/"):
        if segment == ".":
            continue
        if segment == "..":
            if output and output[-1] != "":
                output.pop()
        else:
            output.append(segment)
    if path.endswith(("/.", "/..")):
        output.append("")
    cleaned = "/".join(output)
    if path.startswith("/") and not cleaned.startswith("/"):
        cleaned = "/" + cleaned
    return cleaned


def normalize_url(url: str, base: str | None = None) -> str:
    """Resolve `url` (possibly relative) against `base` and return a
    canonical absolute form: lowercase scheme/host, default port and
    fragment dropped, dot segments removed, empty path becomes '/'."""
    if not url:
        raise MalformedUrl("empty url")
    try:
        absolute = urljoin(base, url) if base else url
        parts = urlsplit(absolute)
    except ValueError as exc:
        raise MalformedUrl(f"cannot parse {url!r}: {exc}") from exc
    if not parts.scheme or not parts.netloc:
        raise MalformedUrl(f"not an absolute url: {url!r}")
    scheme = parts.scheme.lower()
    host = parts.hostname
    if host is None:
        raise MalformedUrl(f"no host in {url!r}")
    netloc = f"[{host}]" if ":" in host else host.lower()
    if parts.port is not None and str(parts.port) != _DEFAULT_PORTS.get(scheme):
        netloc = f"{netloc}:{parts.port}"
    path = _remove_dot_segments(parts.path) or "/"
    return urlunsplit((scheme, netloc, path, parts.query, ""))


class _AnchorCollector(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.hrefs: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag != "a":
            return
        for name, value in attrs:
            if name == "href" and value:
                self.hrefs.append(value)


def extract_links(html: bytes, base: str) -> list[str]:
    """All anchor hyperlink targets resolved against `base`, deduplicated
    in first-occurrence order; non-http(s) and unparseable targets dropped."""
    parser = _AnchorCollector()
    parser.feed(html.decode("utf-8", errors="replace"))
    parser.close()
    seen: set[str] = set()
    links: list[str] = []
    for href in parser.hrefs:
        try:
            url = normalize_url(href.strip(), base)
        except MalformedUrl:
            continue
        if urlsplit(url).scheme not in ("http", "https"):
            continue
        if url not in seen:
            seen.add(url)
            links.append(url)
    return links
