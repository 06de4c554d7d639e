"""Plain-text ontology authoring format.

One statement per line; '#' starts a comment; blank lines ignored.

    base http://example.test/health
    meta application_domain "health care"
    class Condition
    class Pain < Condition
    class Headache < Pain "headache" "head ache"
    property hasRemedy
    property hasPrimaryRemedy < hasRemedy
    domain hasRemedy Condition
    range hasRemedy Remedy
    maxcard hasPrimaryRemedy Disease 1
    individual aspirin : Analgesic
    relate caseOne hasRemedy aspirin
    relate aspirin note "take after food"

'<' and the subset sign are interchangeable; entity names must be
declared before use; 'Thing' is always available as a parent.
"""
from __future__ import annotations

import re
from pathlib import Path

from .ontology import (
    ClassAssertion,
    Domain,
    MaxCardinality,
    Ontology,
    OntologyError,
    OwlLiteViolation,
    PropertyAssertion,
    Range,
    SubClassOf,
    SubPropertyOf,
)

__all__ = ["OntologyParseError", "parse_ontology", "load_ontology", "decamel"]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_QUOTED_RE = re.compile(r'"([^"]*)"')
_META_KEYS = ("application_domain", "semantic_depth")


class OntologyParseError(Exception):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


def decamel(name: str) -> str:
    """CamelCase entity name to a spaced label: TensionHeadache -> 'Tension Headache'."""
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])", " ", name)


def _split_quotes(line: str, line_no: int) -> tuple[list[str], list[str]]:
    """(bare tokens before the first quote, quoted strings)."""
    if line.count('"') % 2 != 0:
        raise OntologyParseError(line_no, "unbalanced quotes")
    first_quote = line.find('"')
    bare = line[:first_quote] if first_quote >= 0 else line
    quoted = _QUOTED_RE.findall(line)
    return bare.split(), quoted


class _Parser:
    def __init__(self) -> None:
        self.ont: Ontology | None = None
        self.pending_meta: dict[str, str] = {}

    def _ontology(self) -> Ontology:
        if self.ont is None:
            self.ont = Ontology()
            self.ont.metadata.update(self.pending_meta)
        return self.ont

    def _name_to_iri(self, name: str, line_no: int) -> str:
        if not _NAME_RE.match(name):
            raise OntologyParseError(line_no, f"invalid entity name {name!r}")
        return f"{self._ontology().base_iri}#{name}"

    def _class(self, name: str, line_no: int):
        if name == "Thing":
            return self._ontology().thing
        cls = self._ontology().classes.get(self._name_to_iri(name, line_no))
        if cls is None:
            raise OntologyParseError(line_no, f"unknown class {name!r}")
        return cls

    def _property(self, name: str, line_no: int):
        prop = self._ontology().properties.get(self._name_to_iri(name, line_no))
        if prop is None:
            raise OntologyParseError(line_no, f"unknown property {name!r}")
        return prop

    def _individual(self, name: str, line_no: int):
        ind = self._ontology().individuals.get(self._name_to_iri(name, line_no))
        if ind is None:
            raise OntologyParseError(line_no, f"unknown individual {name!r}")
        return ind

    def feed(self, line: str, line_no: int) -> None:
        line = self._strip_comment(line).replace("⊂", "<")
        if not line.strip():
            return
        bare, quoted = _split_quotes(line.strip(), line_no)
        keyword = bare[0]
        handler = getattr(self, f"_stmt_{keyword}", None)
        if handler is None:
            raise OntologyParseError(line_no, f"unknown statement {keyword!r}")
        try:
            handler(bare[1:], quoted, line_no)
        except OwlLiteViolation:
            raise  # semantic violations keep their own type
        except OntologyError as exc:
            raise OntologyParseError(line_no, str(exc)) from exc

    @staticmethod
    def _strip_comment(line: str) -> str:
        # a '#' at line start or after whitespace starts a comment,
        # except inside quoted strings
        in_quote = False
        for i, ch in enumerate(line):
            if ch == '"':
                in_quote = not in_quote
            elif ch == "#" and not in_quote and (i == 0 or line[i - 1].isspace()):
                return line[:i].rstrip()
        return line.rstrip()

    # -- statements, one method per keyword ---------------------------------

    def _stmt_base(self, args, quoted, line_no):
        if len(args) != 1 or quoted:
            raise OntologyParseError(line_no, "usage: base <iri>")
        if self.ont is not None:
            raise OntologyParseError(line_no, "base must precede declarations")
        self.ont = Ontology(base_iri=args[0])
        self.ont.metadata.update(self.pending_meta)

    def _stmt_meta(self, args, quoted, line_no):
        if len(args) != 1 or len(quoted) != 1:
            raise OntologyParseError(line_no, 'usage: meta <key> "<value>"')
        if args[0] not in _META_KEYS:
            raise OntologyParseError(
                line_no, f"meta key must be one of {', '.join(_META_KEYS)}"
            )
        if self.ont is None:
            self.pending_meta[args[0]] = quoted[0]
        else:
            self.ont.metadata[args[0]] = quoted[0]

    def _stmt_class(self, args, quoted, line_no):
        if not args:
            raise OntologyParseError(line_no, 'usage: class Name [< Parent] ["syn" ...]')
        name = args[0]
        parent = None
        if len(args) == 3 and args[1] == "<":
            parent = self._class(args[2], line_no)
        elif len(args) != 1:
            raise OntologyParseError(line_no, 'usage: class Name [< Parent] ["syn" ...]')
        cls = self._ontology().declare_class(
            self._name_to_iri(name, line_no), decamel(name), quoted
        )
        if parent is not None:
            self._ontology().assert_axiom(SubClassOf(cls, parent))

    def _stmt_property(self, args, quoted, line_no):
        if not args:
            raise OntologyParseError(line_no, "usage: property name [< parent]")
        name = args[0]
        parent = None
        if len(args) == 3 and args[1] == "<":
            parent = self._property(args[2], line_no)
        elif len(args) != 1:
            raise OntologyParseError(line_no, "usage: property name [< parent]")
        prop = self._ontology().declare_property(
            self._name_to_iri(name, line_no), name, quoted
        )
        if parent is not None:
            self._ontology().assert_axiom(SubPropertyOf(prop, parent))

    def _stmt_domain(self, args, quoted, line_no):
        if len(args) != 2 or quoted:
            raise OntologyParseError(line_no, "usage: domain property Class")
        self._ontology().assert_axiom(
            Domain(self._property(args[0], line_no), self._class(args[1], line_no))
        )

    def _stmt_range(self, args, quoted, line_no):
        if len(args) != 2 or quoted:
            raise OntologyParseError(line_no, "usage: range property Class")
        self._ontology().assert_axiom(
            Range(self._property(args[0], line_no), self._class(args[1], line_no))
        )

    def _stmt_maxcard(self, args, quoted, line_no):
        if len(args) != 3 or quoted:
            raise OntologyParseError(line_no, "usage: maxcard property Class 0|1")
        try:
            n = int(args[2])
        except ValueError:
            raise OntologyParseError(line_no, "cardinality must be an integer")
        self._ontology().assert_axiom(
            MaxCardinality(
                self._property(args[0], line_no), self._class(args[1], line_no), n
            )
        )

    def _stmt_individual(self, args, quoted, line_no):
        if len(args) != 3 or args[1] != ":":
            raise OntologyParseError(line_no, "usage: individual name : Class")
        name = args[0]
        cls = self._class(args[2], line_no)
        ind = self._ontology().declare_individual(
            self._name_to_iri(name, line_no), decamel(name), quoted
        )
        self._ontology().assert_axiom(ClassAssertion(ind, cls))

    def _stmt_relate(self, args, quoted, line_no):
        if len(args) == 3 and not quoted:
            obj = self._individual(args[2], line_no)
        elif len(args) == 2 and len(quoted) == 1:
            obj = quoted[0]
        else:
            raise OntologyParseError(
                line_no, 'usage: relate subject property (object | "literal")'
            )
        self._ontology().assert_axiom(
            PropertyAssertion(
                self._individual(args[0], line_no),
                self._property(args[1], line_no),
                obj,
            )
        )


def parse_ontology(text: str) -> Ontology:
    parser = _Parser()
    for line_no, line in enumerate(text.splitlines(), start=1):
        parser.feed(line, line_no)
    ont = parser.ont
    if ont is None:
        ont = Ontology()
        ont.metadata.update(parser.pending_meta)
    return ont


def load_ontology(path: str | Path) -> Ontology:
    return parse_ontology(Path(path).read_text(encoding="utf-8"))
