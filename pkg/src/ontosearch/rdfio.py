"""Bidirectional mapping between the ontology model and RDF triples.

N-Triples is the canonical interchange form: one triple per line, lines
sorted lexicographically, so serialization is byte-deterministic.
Turtle is a human-readable export limited to the constructs this module
itself emits.  Literals are plain strings (no datatypes or language
tags); blank nodes are never produced — max-cardinality restrictions
get deterministic minted IRIs instead.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable

from .ontology import (
    OWL_THING_IRI,
    THING,
    ClassAssertion,
    Domain,
    IndividualId,
    MaxCardinality,
    Ontology,
    OntologyError,
    OwlLiteViolation,
    PropertyAssertion,
    Range,
    SubClassOf,
    SubPropertyOf,
)

__all__ = [
    "Triple",
    "MalformedGraph",
    "ParseError",
    "to_triples",
    "from_triples",
    "write_ntriples",
    "parse_ntriples",
    "write_turtle",
    "parse_turtle",
]

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
VOCAB_NS = "http://ontosearch.example/vocab#"
RESTRICTION_NS = "http://ontosearch.example/restriction#"

RDF_TYPE = RDF_NS + "type"
RDF_PROPERTY = RDF_NS + "Property"
RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"
RDFS_SUBPROPERTYOF = RDFS_NS + "subPropertyOf"
RDFS_DOMAIN = RDFS_NS + "domain"
RDFS_RANGE = RDFS_NS + "range"
RDFS_LABEL = RDFS_NS + "label"
OWL_CLASS = OWL_NS + "Class"
OWL_ONTOLOGY = OWL_NS + "Ontology"
OWL_NAMED_INDIVIDUAL = OWL_NS + "NamedIndividual"
OWL_ON_PROPERTY = OWL_NS + "onProperty"
OWL_MAX_CARDINALITY = OWL_NS + "maxCardinality"
SYNONYM = VOCAB_NS + "synonym"
APPLICATION_DOMAIN = VOCAB_NS + "applicationDomain"
SEMANTIC_DEPTH = VOCAB_NS + "semanticDepth"

_META_PREDICATES = {
    "application_domain": APPLICATION_DOMAIN,
    "semantic_depth": SEMANTIC_DEPTH,
}


class MalformedGraph(OntologyError):
    pass


class ParseError(Exception):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True, order=True)
class Triple:
    subject: str
    predicate: str
    obj: str
    obj_is_literal: bool = False


def _restriction_iri(prop_iri: str, cls_iri: str, n: int) -> str:
    digest = hashlib.sha256(f"{prop_iri}|{cls_iri}|{n}".encode("utf-8")).hexdigest()
    return RESTRICTION_NS + digest[:16]


# -- ontology -> triples -----------------------------------------------------

def to_triples(ont: Ontology) -> frozenset[Triple]:
    problems = ont.validate()
    if problems:
        raise MalformedGraph(f"ontology invalid, first problem: {problems[0]}")
    triples: set[Triple] = set()
    triples.add(Triple(ont.base_iri, RDF_TYPE, OWL_ONTOLOGY))
    for key, predicate in _META_PREDICATES.items():
        value = ont.metadata.get(key)
        if value:
            triples.add(Triple(ont.base_iri, predicate, value, True))

    for registry, type_iri in (
        (ont.classes, OWL_CLASS),
        (ont.properties, RDF_PROPERTY),
        (ont.individuals, OWL_NAMED_INDIVIDUAL),
    ):
        for entity in registry.values():
            triples.add(Triple(entity.iri, RDF_TYPE, type_iri))
            triples.add(Triple(entity.iri, RDFS_LABEL, entity.label, True))
            for synonym in entity.synonyms:
                triples.add(Triple(entity.iri, SYNONYM, synonym, True))

    for axiom in ont.axioms:
        if isinstance(axiom, SubClassOf):
            triples.add(Triple(axiom.sub.iri, RDFS_SUBCLASSOF, axiom.sup.iri))
        elif isinstance(axiom, SubPropertyOf):
            triples.add(Triple(axiom.sub.iri, RDFS_SUBPROPERTYOF, axiom.sup.iri))
        elif isinstance(axiom, Domain):
            triples.add(Triple(axiom.prop.iri, RDFS_DOMAIN, axiom.cls.iri))
        elif isinstance(axiom, Range):
            triples.add(Triple(axiom.prop.iri, RDFS_RANGE, axiom.cls.iri))
        elif isinstance(axiom, ClassAssertion):
            triples.add(Triple(axiom.ind.iri, RDF_TYPE, axiom.cls.iri))
        elif isinstance(axiom, PropertyAssertion):
            if isinstance(axiom.obj, IndividualId):
                triples.add(Triple(axiom.subj.iri, axiom.prop.iri, axiom.obj.iri))
            else:
                triples.add(Triple(axiom.subj.iri, axiom.prop.iri, axiom.obj, True))
        elif isinstance(axiom, MaxCardinality):
            restriction = _restriction_iri(axiom.prop.iri, axiom.cls.iri, axiom.n)
            triples.add(Triple(axiom.cls.iri, RDFS_SUBCLASSOF, restriction))
            triples.add(Triple(restriction, OWL_ON_PROPERTY, axiom.prop.iri))
            triples.add(
                Triple(restriction, OWL_MAX_CARDINALITY, str(axiom.n), True)
            )
    return frozenset(triples)


# -- triples -> ontology -----------------------------------------------------

def from_triples(graph: Iterable[Triple]) -> tuple[Ontology, list[Triple]]:
    """Rebuild an Ontology; second return value lists ignored triples
    (unknown predicates or unknown rdf:type vocabulary).

    Raises MalformedGraph for a missing/duplicate ontology header,
    dangling restriction structure, or axiom triples that reference
    undeclared entities; OwlLiteViolation for cardinality outside {0, 1}.
    """
    triples = set(graph)
    headers = [
        t for t in triples if t.predicate == RDF_TYPE and t.obj == OWL_ONTOLOGY
    ]
    if not headers:
        raise MalformedGraph("no ontology header triple")
    if len(headers) > 1:
        raise MalformedGraph("multiple ontology header triples")
    base_iri = headers[0].subject
    ont = Ontology(base_iri=base_iri)

    by_subject: dict[str, list[Triple]] = {}
    for t in triples:
        by_subject.setdefault(t.subject, []).append(t)

    def literal_objects(subject: str, predicate: str) -> list[str]:
        return sorted(
            t.obj
            for t in by_subject.get(subject, ())
            if t.predicate == predicate and t.obj_is_literal
        )

    def label_for(subject: str) -> str:
        labels = literal_objects(subject, RDFS_LABEL)
        if labels:
            return labels[0]
        tail = subject.rsplit("#", 1)[-1].rsplit("/", 1)[-1]
        return tail or subject

    # restriction subjects: anything carrying onProperty or maxCardinality
    restriction_subjects = {
        t.subject
        for t in triples
        if t.predicate in (OWL_ON_PROPERTY, OWL_MAX_CARDINALITY)
    }

    class_iris = {
        t.subject for t in triples if t.predicate == RDF_TYPE and t.obj == OWL_CLASS
    }
    property_iris = {
        t.subject
        for t in triples
        if t.predicate == RDF_TYPE and t.obj == RDF_PROPERTY
    }
    individual_iris = {
        t.subject
        for t in triples
        if t.predicate == RDF_TYPE and t.obj == OWL_NAMED_INDIVIDUAL
    }

    for iri in sorted(class_iris):
        ont.declare_class(iri, label_for(iri), literal_objects(iri, SYNONYM))
    for iri in sorted(property_iris):
        ont.declare_property(iri, label_for(iri), literal_objects(iri, SYNONYM))
    for iri in sorted(individual_iris):
        ont.declare_individual(iri, label_for(iri), literal_objects(iri, SYNONYM))

    def require_class(iri: str, context: Triple):
        if iri == OWL_THING_IRI:
            return THING
        cls = ont.classes.get(iri)
        if cls is None:
            raise MalformedGraph(f"undeclared class {iri} in {context}")
        return cls

    def require_property(iri: str, context: Triple):
        prop = ont.properties.get(iri)
        if prop is None:
            raise MalformedGraph(f"undeclared property {iri} in {context}")
        return prop

    def require_individual(iri: str, context: Triple):
        ind = ont.individuals.get(iri)
        if ind is None:
            raise MalformedGraph(f"undeclared individual {iri} in {context}")
        return ind

    # max-cardinality restrictions first, so their triples are accounted for
    for restriction in sorted(restriction_subjects):
        on_property = [
            t for t in by_subject.get(restriction, ())
            if t.predicate == OWL_ON_PROPERTY
        ]
        cardinality = [
            t for t in by_subject.get(restriction, ())
            if t.predicate == OWL_MAX_CARDINALITY
        ]
        owners = [
            t for t in triples
            if t.predicate == RDFS_SUBCLASSOF and t.obj == restriction
        ]
        if len(on_property) != 1 or len(cardinality) != 1 or not owners:
            raise MalformedGraph(
                f"dangling or ambiguous restriction structure at {restriction}"
            )
        if not cardinality[0].obj_is_literal or not cardinality[0].obj.isdigit():
            raise MalformedGraph(
                f"non-numeric max cardinality at {restriction}"
            )
        n = int(cardinality[0].obj)
        if n not in (0, 1):
            raise OwlLiteViolation(f"max cardinality must be 0 or 1, got {n}")
        prop = require_property(on_property[0].obj, on_property[0])
        for owner in owners:
            cls = require_class(owner.subject, owner)
            ont.assert_axiom(MaxCardinality(prop, cls, n))

    metadata_values = {
        key: literal_objects(base_iri, predicate)
        for key, predicate in _META_PREDICATES.items()
    }
    for key, vals in metadata_values.items():
        if vals:
            ont.metadata[key] = vals[0]

    ignored: list[Triple] = []
    for t in sorted(triples):
        if t.subject in restriction_subjects:
            continue  # consumed above
        if t.predicate == RDF_TYPE:
            if t.obj in (OWL_CLASS, RDF_PROPERTY, OWL_NAMED_INDIVIDUAL, OWL_ONTOLOGY):
                continue
            if t.obj == OWL_THING_IRI or t.obj in class_iris:
                ind = require_individual(t.subject, t)
                ont.assert_axiom(ClassAssertion(ind, require_class(t.obj, t)))
            else:
                ignored.append(t)
        elif t.predicate == RDFS_SUBCLASSOF:
            if t.obj in restriction_subjects:
                continue  # consumed above
            sub = require_class(t.subject, t)
            sup = require_class(t.obj, t)
            ont.assert_axiom(SubClassOf(sub, sup))
        elif t.predicate == RDFS_SUBPROPERTYOF:
            ont.assert_axiom(
                SubPropertyOf(
                    require_property(t.subject, t), require_property(t.obj, t)
                )
            )
        elif t.predicate == RDFS_DOMAIN:
            ont.assert_axiom(
                Domain(require_property(t.subject, t), require_class(t.obj, t))
            )
        elif t.predicate == RDFS_RANGE:
            ont.assert_axiom(
                Range(require_property(t.subject, t), require_class(t.obj, t))
            )
        elif t.predicate in (RDFS_LABEL, SYNONYM):
            continue  # consumed at declaration time
        elif t.predicate in (APPLICATION_DOMAIN, SEMANTIC_DEPTH):
            continue  # header metadata, consumed above
        elif t.predicate in ont.properties:
            subj = require_individual(t.subject, t)
            prop = ont.properties[t.predicate]
            if t.obj_is_literal:
                ont.assert_axiom(PropertyAssertion(subj, prop, t.obj))
            else:
                obj = require_individual(t.obj, t)
                ont.assert_axiom(PropertyAssertion(subj, prop, obj))
        else:
            ignored.append(t)
    return ont, ignored


# -- N-Triples ---------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def _format_triple(t: Triple) -> str:
    obj = f'"{_escape_literal(t.obj)}"' if t.obj_is_literal else f"<{t.obj}>"
    return f"<{t.subject}> <{t.predicate}> {obj} ."


def write_ntriples(graph: Iterable[Triple]) -> bytes:
    lines = sorted(_format_triple(t) for t in graph)
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


class _LineScanner:
    def __init__(self, line: str, line_no: int):
        self.line = line
        self.pos = 0
        self.line_no = line_no

    def error(self, reason: str) -> ParseError:
        return ParseError(self.line_no, reason)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ""

    def read_iri(self) -> str:
        if self.peek() != "<":
            raise self.error(f"expected '<' at column {self.pos + 1}")
        end = self.line.find(">", self.pos + 1)
        if end < 0:
            raise self.error("unterminated IRI")
        iri = self.line[self.pos + 1 : end]
        self.pos = end + 1
        return iri

    def read_literal(self) -> str:
        out = []
        i = self.pos + 1
        while i < len(self.line):
            ch = self.line[i]
            if ch == "\\":
                if i + 1 >= len(self.line):
                    raise self.error("dangling escape in literal")
                nxt = self.line[i + 1]
                if nxt == "u":
                    out.append(chr(int(self.line[i + 2 : i + 6], 16)))
                    i += 6
                    continue
                if nxt == "U":
                    out.append(chr(int(self.line[i + 2 : i + 10], 16)))
                    i += 10
                    continue
                mapped = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
                if mapped is None:
                    raise self.error(f"unknown escape \\{nxt}")
                out.append(mapped)
                i += 2
                continue
            if ch == '"':
                self.pos = i + 1
                return "".join(out)
            out.append(ch)
            i += 1
        raise self.error("unterminated literal")


def parse_ntriples(data: bytes | str) -> frozenset[Triple]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    triples: set[Triple] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        scanner = _LineScanner(raw, line_no)
        scanner.skip_ws()
        subject = scanner.read_iri()
        scanner.skip_ws()
        predicate = scanner.read_iri()
        scanner.skip_ws()
        if scanner.peek() == "<":
            obj, is_literal = scanner.read_iri(), False
        elif scanner.peek() == '"':
            obj, is_literal = scanner.read_literal(), True
        else:
            raise scanner.error("expected IRI or literal object")
        scanner.skip_ws()
        if scanner.peek() != ".":
            raise scanner.error("missing terminal '.'")
        scanner.pos += 1
        scanner.skip_ws()
        rest = scanner.line[scanner.pos :].strip()
        if rest and not rest.startswith("#"):
            raise scanner.error(f"unexpected trailing content {rest!r}")
        triples.add(Triple(subject, predicate, obj, is_literal))
    return frozenset(triples)


# -- Turtle ------------------------------------------------------------------

_PREFIXES = (
    ("rdf", RDF_NS),
    ("rdfs", RDFS_NS),
    ("owl", OWL_NS),
    ("vocab", VOCAB_NS),
    ("restr", RESTRICTION_NS),
)

_LOCAL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")


def _qname(iri: str, prefixes: list[tuple[str, str]]) -> str:
    for prefix, ns in prefixes:
        if iri.startswith(ns):
            local = iri[len(ns) :]
            if _LOCAL_RE.match(local):
                return f"{prefix}:{local}"
    return f"<{iri}>"


def write_turtle(graph: Iterable[Triple], base_iri: str | None = None) -> bytes:
    triples = sorted(graph)
    prefixes = list(_PREFIXES)
    if base_iri:
        prefixes.append(("base", base_iri + "#"))
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in prefixes]
    lines.append("")
    by_subject: dict[str, list[Triple]] = {}
    for t in triples:
        by_subject.setdefault(t.subject, []).append(t)
    for subject in sorted(by_subject):
        rows = by_subject[subject]
        parts = []
        for t in rows:
            if t.predicate == RDF_TYPE:
                pred = "a"
            else:
                pred = _qname(t.predicate, prefixes)
            obj = (
                f'"{_escape_literal(t.obj)}"'
                if t.obj_is_literal
                else _qname(t.obj, prefixes)
            )
            parts.append(f"{pred} {obj}")
        joined = " ;\n    ".join(parts)
        lines.append(f"{_qname(subject, prefixes)} {joined} .")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_turtle(data: bytes | str) -> frozenset[Triple]:
    """Reads exactly the subset write_turtle emits: @prefix declarations,
    subject blocks with ';'-separated predicate-object pairs, 'a' for
    rdf:type, qnames or <iri> terms, and plain-string literals."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    prefixes: dict[str, str] = {}
    triples: set[Triple] = set()

    statements: list[tuple[int, str]] = []
    current: list[str] = []
    start_line = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not current:
            start_line = line_no
        current.append(stripped)
        if stripped.endswith("."):
            statements.append((start_line, " ".join(current)))
            current = []
    if current:
        raise ParseError(start_line, "statement missing terminal '.'")

    def expand(term: str, line_no: int) -> tuple[str, bool]:
        if term.startswith("<") and term.endswith(">"):
            return term[1:-1], False
        if term.startswith('"'):
            scanner = _LineScanner(term, line_no)
            return scanner.read_literal(), True
        if term == "a":
            return RDF_TYPE, False
        if ":" in term:
            prefix, local = term.split(":", 1)
            if prefix not in prefixes:
                raise ParseError(line_no, f"unknown prefix {prefix!r}")
            return prefixes[prefix] + local, False
        raise ParseError(line_no, f"cannot read term {term!r}")

    for line_no, statement in statements:
        body = statement[:-1].strip()  # drop the terminal '.'
        if statement.startswith("@prefix"):
            match = re.match(r"@prefix\s+([A-Za-z][\w-]*)?:\s+<([^>]*)>$", body)
            if not match:
                raise ParseError(line_no, f"bad @prefix statement {statement!r}")
            prefixes[match.group(1) or ""] = match.group(2)
            continue
        tokens = _turtle_tokens(body, line_no)
        if len(tokens) < 3:
            raise ParseError(line_no, "statement too short")
        subject, _ = expand(tokens[0], line_no)
        rest = tokens[1:]
        groups: list[list[str]] = [[]]
        for token in rest:
            if token == ";":
                groups.append([])
            else:
                groups[-1].append(token)
        for group in groups:
            if not group:
                continue
            if len(group) != 2:
                raise ParseError(line_no, f"expected 'predicate object', got {group!r}")
            predicate, _ = expand(group[0], line_no)
            obj, is_literal = expand(group[1], line_no)
            triples.add(Triple(subject, predicate, obj, is_literal))
    return frozenset(triples)


def _turtle_tokens(body: str, line_no: int) -> list[str]:
    tokens = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch in " \t":
            i += 1
            continue
        if ch == ";":
            tokens.append(";")
            i += 1
            continue
        if ch == "<":
            end = body.find(">", i)
            if end < 0:
                raise ParseError(line_no, "unterminated IRI")
            tokens.append(body[i : end + 1])
            i = end + 1
            continue
        if ch == '"':
            j = i + 1
            while j < len(body):
                if body[j] == "\\":
                    j += 2
                    continue
                if body[j] == '"':
                    break
                j += 1
            if j >= len(body):
                raise ParseError(line_no, "unterminated literal")
            tokens.append(body[i : j + 1])
            i = j + 1
            continue
        j = i
        while j < len(body) and body[j] not in " \t;":
            j += 1
        tokens.append(body[i:j])
        i = j
    return tokens
