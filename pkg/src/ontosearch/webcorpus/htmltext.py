"""Forgiving HTML-to-text extraction."""
from __future__ import annotations

from html.parser import HTMLParser

__all__ = ["extract_text"]

# Tags whose boundaries separate lines of extracted text.
_BLOCK_TAGS = frozenset(
    {
        "address", "article", "aside", "blockquote", "br", "dd", "div",
        "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form",
        "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main",
        "nav", "ol", "p", "pre", "section", "table", "td", "th", "tr", "ul",
    }
)

_SKIP_TAGS = frozenset({"script", "style"})


_BOUNDARY = None  # marks a block-tag edge in the accumulated parts


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._skipping = 0
        self._in_title = False
        self._title: list[str] = []
        self._body: list[str | None] = []

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skipping += 1
        elif tag == "title":
            self._in_title = True
        elif tag in _BLOCK_TAGS:
            self._body.append(_BOUNDARY)

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            if self._skipping:
                self._skipping -= 1
        elif tag == "title":
            self._in_title = False
        elif tag in _BLOCK_TAGS:
            self._body.append(_BOUNDARY)

    def handle_data(self, data):
        if self._skipping:
            return
        if self._in_title:
            self._title.append(data)
        else:
            self._body.append(data)

    def title_text(self) -> str:
        return " ".join("".join(self._title).split())

    def body_text(self) -> str:
        lines: list[str] = []
        current: list[str] = []

        def flush() -> None:
            words = "".join(current).split()
            if words:
                lines.append(" ".join(words))
            current.clear()

        for part in self._body:
            if part is _BOUNDARY:
                flush()
            else:
                current.append(part)
        flush()
        return "\n".join(lines)


def extract_text(html: bytes) -> tuple[str, str]:
    """(title, body): tags stripped, script/style/comment content removed,
    block boundaries as single newlines, whitespace collapsed, entities
    decoded.  Never raises on malformed input."""
    parser = _TextExtractor()
    parser.feed(html.decode("utf-8", errors="replace"))
    parser.close()
    return parser.title_text(), parser.body_text()
