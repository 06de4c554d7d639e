"""In-memory OWL-Lite-subset ontology model.

Named classes, properties, and individuals only; the axiom kinds are
SubClassOf, SubPropertyOf, Domain, Range, ClassAssertion,
PropertyAssertion, and MaxCardinality with n restricted to 0 or 1.
The root class Thing is implicit: always known, never serialized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union
from urllib.parse import urlsplit

__all__ = [
    "OWL_THING_IRI",
    "ClassId",
    "PropertyId",
    "IndividualId",
    "SubClassOf",
    "SubPropertyOf",
    "Domain",
    "Range",
    "ClassAssertion",
    "PropertyAssertion",
    "MaxCardinality",
    "Axiom",
    "Violation",
    "Ontology",
    "OntologyError",
    "DuplicateIri",
    "UnknownEntity",
    "OwlLiteViolation",
    "SelfSubclass",
    "InvalidOntology",
]

OWL_THING_IRI = "http://www.w3.org/2002/07/owl#Thing"


class OntologyError(Exception):
    pass


class DuplicateIri(OntologyError):
    pass


class UnknownEntity(OntologyError):
    pass


class OwlLiteViolation(OntologyError):
    pass


class SelfSubclass(OntologyError):
    pass


class InvalidOntology(OntologyError):
    pass


@dataclass(frozen=True)
class ClassId:
    iri: str
    label: str
    synonyms: tuple[str, ...] = ()


@dataclass(frozen=True)
class PropertyId:
    iri: str
    label: str
    synonyms: tuple[str, ...] = ()


@dataclass(frozen=True)
class IndividualId:
    iri: str
    label: str
    synonyms: tuple[str, ...] = ()


THING = ClassId(OWL_THING_IRI, "Thing")


@dataclass(frozen=True)
class SubClassOf:
    sub: ClassId
    sup: ClassId


@dataclass(frozen=True)
class SubPropertyOf:
    sub: PropertyId
    sup: PropertyId


@dataclass(frozen=True)
class Domain:
    prop: PropertyId
    cls: ClassId


@dataclass(frozen=True)
class Range:
    prop: PropertyId
    cls: ClassId


@dataclass(frozen=True)
class ClassAssertion:
    ind: IndividualId
    cls: ClassId


@dataclass(frozen=True)
class PropertyAssertion:
    subj: IndividualId
    prop: PropertyId
    obj: Union[IndividualId, str]  # str means a plain literal


@dataclass(frozen=True)
class MaxCardinality:
    prop: PropertyId
    cls: ClassId
    n: int


Axiom = Union[
    SubClassOf,
    SubPropertyOf,
    Domain,
    Range,
    ClassAssertion,
    PropertyAssertion,
    MaxCardinality,
]


@dataclass(frozen=True)
class Violation:
    kind: str  # dangling-reference | duplicate-iri | thing-as-subclass | self-subclass | owl-lite
    subject: str
    detail: str


def _check_iri(iri: str) -> None:
    parts = urlsplit(iri)
    if not parts.scheme or (not parts.netloc and not parts.path):
        raise OntologyError(f"not an absolute iri: {iri!r}")


def _clean_synonyms(synonyms) -> tuple[str, ...]:
    return tuple(sorted({s.strip() for s in synonyms if s.strip()}))


@dataclass
class Ontology:
    base_iri: str = "http://ontosearch.example/onto"
    metadata: dict[str, str] = field(default_factory=dict)
    classes: dict[str, ClassId] = field(default_factory=dict)
    properties: dict[str, PropertyId] = field(default_factory=dict)
    individuals: dict[str, IndividualId] = field(default_factory=dict)
    axioms: set[Axiom] = field(default_factory=set)

    # -- declarations ------------------------------------------------------

    def _register(self, entity, registry: dict):
        existing = self._lookup(entity.iri)
        if existing is not None:
            if existing == entity:
                return existing  # identical re-declaration is a no-op
            raise DuplicateIri(
                f"{entity.iri} already declared as {type(existing).__name__}"
            )
        registry[entity.iri] = entity
        return entity

    def _lookup(self, iri: str):
        for registry in (self.classes, self.properties, self.individuals):
            if iri in registry:
                return registry[iri]
        if iri == OWL_THING_IRI:
            return THING
        return None

    def declare_class(self, iri: str, label: str, synonyms=()) -> ClassId:
        _check_iri(iri)
        if not label:
            raise OntologyError(f"class {iri} needs a nonempty label")
        return self._register(
            ClassId(iri, label, _clean_synonyms(synonyms)), self.classes
        )

    def declare_property(self, iri: str, label: str, synonyms=()) -> PropertyId:
        _check_iri(iri)
        if not label:
            raise OntologyError(f"property {iri} needs a nonempty label")
        return self._register(
            PropertyId(iri, label, _clean_synonyms(synonyms)), self.properties
        )

    def declare_individual(self, iri: str, label: str, synonyms=()) -> IndividualId:
        _check_iri(iri)
        if not label:
            raise OntologyError(f"individual {iri} needs a nonempty label")
        return self._register(
            IndividualId(iri, label, _clean_synonyms(synonyms)), self.individuals
        )

    @property
    def thing(self) -> ClassId:
        return THING

    # -- axioms ------------------------------------------------------------

    def _require(self, entity) -> None:
        if isinstance(entity, ClassId):
            if entity.iri == OWL_THING_IRI:
                return
            known = self.classes.get(entity.iri)
        elif isinstance(entity, PropertyId):
            known = self.properties.get(entity.iri)
        else:
            known = self.individuals.get(entity.iri)
        if known != entity:
            raise UnknownEntity(f"{entity.iri} is not declared in this ontology")

    def assert_axiom(self, axiom: Axiom) -> "Ontology":
        if isinstance(axiom, SubClassOf):
            self._require(axiom.sub)
            self._require(axiom.sup)
            if axiom.sub == axiom.sup:
                raise SelfSubclass(f"{axiom.sub.iri} cannot subclass itself")
            if axiom.sub.iri == OWL_THING_IRI:
                raise OwlLiteViolation("Thing cannot be the sub side of SubClassOf")
        elif isinstance(axiom, SubPropertyOf):
            self._require(axiom.sub)
            self._require(axiom.sup)
            if axiom.sub == axiom.sup:
                raise SelfSubclass(f"{axiom.sub.iri} cannot subproperty itself")
        elif isinstance(axiom, (Domain, Range)):
            self._require(axiom.prop)
            self._require(axiom.cls)
        elif isinstance(axiom, ClassAssertion):
            self._require(axiom.ind)
            self._require(axiom.cls)
        elif isinstance(axiom, PropertyAssertion):
            self._require(axiom.subj)
            self._require(axiom.prop)
            if isinstance(axiom.obj, IndividualId):
                self._require(axiom.obj)
        elif isinstance(axiom, MaxCardinality):
            self._require(axiom.prop)
            self._require(axiom.cls)
            if axiom.n not in (0, 1):
                raise OwlLiteViolation(
                    f"max cardinality must be 0 or 1, got {axiom.n}"
                )
        else:
            raise OntologyError(f"unknown axiom kind: {axiom!r}")
        self.axioms.add(axiom)
        return self

    def axioms_of(self, kind) -> list[Axiom]:
        """Axioms of one kind in a deterministic (sorted by repr) order."""
        return sorted((a for a in self.axioms if isinstance(a, kind)), key=repr)

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[Violation]:
        violations: list[Violation] = []
        seen: dict[str, str] = {}
        for kind_name, registry in (
            ("class", self.classes),
            ("property", self.properties),
            ("individual", self.individuals),
        ):
            for iri in registry:
                if iri in seen:
                    violations.append(
                        Violation("duplicate-iri", iri,
                                  f"declared as both {seen[iri]} and {kind_name}")
                    )
                seen[iri] = kind_name

        def check_ref(entity, axiom) -> None:
            try:
                self._require(entity)
            except UnknownEntity:
                violations.append(
                    Violation("dangling-reference", entity.iri,
                              f"referenced by {axiom!r} but not declared")
                )

        for axiom in sorted(self.axioms, key=repr):
            if isinstance(axiom, SubClassOf):
                check_ref(axiom.sub, axiom)
                check_ref(axiom.sup, axiom)
                if axiom.sub.iri == OWL_THING_IRI:
                    violations.append(
                        Violation("thing-as-subclass", axiom.sub.iri,
                                  f"Thing asserted under {axiom.sup.iri}")
                    )
                if axiom.sub == axiom.sup:
                    violations.append(
                        Violation("self-subclass", axiom.sub.iri,
                                  "class asserted as its own subclass")
                    )
            elif isinstance(axiom, SubPropertyOf):
                check_ref(axiom.sub, axiom)
                check_ref(axiom.sup, axiom)
                if axiom.sub == axiom.sup:
                    violations.append(
                        Violation("self-subclass", axiom.sub.iri,
                                  "property asserted as its own subproperty")
                    )
            elif isinstance(axiom, (Domain, Range)):
                check_ref(axiom.prop, axiom)
                check_ref(axiom.cls, axiom)
            elif isinstance(axiom, ClassAssertion):
                check_ref(axiom.ind, axiom)
                check_ref(axiom.cls, axiom)
            elif isinstance(axiom, PropertyAssertion):
                check_ref(axiom.subj, axiom)
                check_ref(axiom.prop, axiom)
                if isinstance(axiom.obj, IndividualId):
                    check_ref(axiom.obj, axiom)
            elif isinstance(axiom, MaxCardinality):
                check_ref(axiom.prop, axiom)
                check_ref(axiom.cls, axiom)
                if axiom.n not in (0, 1):
                    violations.append(
                        Violation("owl-lite", axiom.prop.iri,
                                  f"max cardinality {axiom.n} outside {{0, 1}}")
                    )
        return violations
