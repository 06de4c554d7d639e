"""Structural reasoner for the OWL-Lite subset.

Computes the reflexive-transitive subsumption closure of the asserted
hierarchy (cycles collapse into equivalence groups), derives nearest
distinct parents by transitive reduction over the group condensation,
infers individual types from domain/range, and reports max-cardinality
violations plus redundancy notes.  Closure plus rule application is
complete for this axiom subset; no tableau machinery is involved.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .ontology import (
    OWL_THING_IRI,
    ClassAssertion,
    ClassId,
    Domain,
    IndividualId,
    InvalidOntology,
    MaxCardinality,
    Ontology,
    OntologyError,
    PropertyAssertion,
    Range,
    SubClassOf,
    SubPropertyOf,
)

__all__ = [
    "UnknownClass",
    "InferredHierarchy",
    "ConsistencyEntry",
    "ConsistencyReport",
    "classify",
    "is_subsumed",
    "infer_types",
    "check_consistency",
]


class UnknownClass(OntologyError):
    pass


def _iri(entity) -> str:
    return entity.iri if hasattr(entity, "iri") else entity


def _strongly_connected_components(
    nodes: list[str], edges: dict[str, set[str]]
) -> list[list[str]]:
    """Iterative Tarjan; returns components as sorted member lists."""
    index_of: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in nodes:
        if root in index_of:
            continue
        work = [(root, iter(sorted(edges.get(root, ()))))]
        index_of[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, successors = work[-1]
            advanced = False
            for succ in successors:
                if succ not in index_of:
                    index_of[succ] = lowlink[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(sorted(edges.get(succ, ())))))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index_of[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index_of[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(sorted(component))
    return components


def _closure_over_groups(
    nodes: list[str], edges: dict[str, set[str]]
) -> tuple[dict[str, str], dict[str, set[str]], set[tuple[str, str]]]:
    """(rep_of, group_reach, pair_closure) for one directed graph.

    rep_of maps node -> group representative (smallest member iri);
    group_reach maps rep -> set of reachable reps (reflexive);
    pair_closure is the node-level reflexive-transitive closure.
    """
    components = _strongly_connected_components(nodes, edges)
    rep_of: dict[str, str] = {}
    members: dict[str, list[str]] = {}
    for component in components:
        rep = component[0]  # members are sorted
        members[rep] = component
        for node in component:
            rep_of[node] = rep

    group_edges: dict[str, set[str]] = {rep: set() for rep in members}
    for src, dsts in edges.items():
        for dst in dsts:
            a, b = rep_of[src], rep_of[dst]
            if a != b:
                group_edges[a].add(b)

    # Tarjan emits components in reverse topological order of the
    # condensation (successors first), so one pass suffices.
    group_reach: dict[str, set[str]] = {}
    for component in components:
        rep = rep_of[component[0]]
        reach = {rep}
        for parent in group_edges[rep]:
            reach |= group_reach[parent]
        group_reach[rep] = reach

    pair_closure: set[tuple[str, str]] = set()
    for rep, reach in group_reach.items():
        for node in members[rep]:
            for parent_rep in reach:
                for target in members[parent_rep]:
                    pair_closure.add((node, target))
    return rep_of, group_reach, pair_closure


@dataclass(frozen=True)
class InferredHierarchy:
    closure: frozenset[tuple[str, str]]
    equiv_groups: tuple[tuple[str, ...], ...]  # sorted members, sorted groups
    direct_parents: dict[str, frozenset[str]]  # class iri -> parent group reps
    property_closure: frozenset[tuple[str, str]]
    group_of: dict[str, str] = field(repr=False, default_factory=dict)

    def knows(self, cls) -> bool:
        return _iri(cls) in self.group_of

    def require(self, cls) -> str:
        iri = _iri(cls)
        if iri not in self.group_of:
            raise UnknownClass(iri)
        return iri

    def classes(self) -> list[str]:
        return sorted(self.group_of)

    def group_members(self, cls) -> tuple[str, ...]:
        rep = self.group_of[self.require(cls)]
        for group in self.equiv_groups:
            if group[0] == rep:
                return group
        raise UnknownClass(rep)

    def subclasses_of(self, cls) -> set[str]:
        """All classes subsumed by cls, including itself and equivalents."""
        sup = self.require(cls)
        return {sub for sub, target in self.closure if target == sup}

    def depth(self, sub, sup) -> int | None:
        """Shortest subsumption distance, in group steps, from sub up to sup;
        0 inside one equivalence group, None if not subsumed."""
        start = self.group_of[self.require(sub)]
        goal = self.group_of[self.require(sup)]
        if start == goal:
            return 0
        group_parents: dict[str, set[str]] = {}
        for iri, parents in self.direct_parents.items():
            rep = self.group_of[iri]
            group_parents.setdefault(rep, set()).update(parents)
        seen = {start}
        queue = deque([(start, 0)])
        while queue:
            node, dist = queue.popleft()
            for parent in group_parents.get(node, ()):
                if parent == goal:
                    return dist + 1
                if parent not in seen:
                    seen.add(parent)
                    queue.append((parent, dist + 1))
        return None

    # -- persistence ---------------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "format": 1,
            "closure": sorted(list(pair) for pair in self.closure),
            "equiv_groups": [list(group) for group in self.equiv_groups],
            "direct_parents": {
                iri: sorted(parents) for iri, parents in sorted(self.direct_parents.items())
            },
            "property_closure": sorted(list(pair) for pair in self.property_closure),
        }
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "InferredHierarchy":
        payload = json.loads(text)
        if payload.get("format") != 1:
            raise ValueError(f"unsupported hierarchy format: {payload.get('format')!r}")
        groups = tuple(tuple(group) for group in payload["equiv_groups"])
        group_of = {member: group[0] for group in groups for member in group}
        return cls(
            closure=frozenset(tuple(pair) for pair in payload["closure"]),
            equiv_groups=groups,
            direct_parents={
                iri: frozenset(parents)
                for iri, parents in payload["direct_parents"].items()
            },
            property_closure=frozenset(
                tuple(pair) for pair in payload["property_closure"]
            ),
            group_of=group_of,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "InferredHierarchy":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def classify(ont: Ontology) -> InferredHierarchy:
    """Closure, equivalence groups, nearest parents, property closure."""
    problems = ont.validate()
    if problems:
        raise InvalidOntology(
            f"{len(problems)} validation problem(s), first: {problems[0]}"
        )

    class_nodes = sorted(ont.classes) + [OWL_THING_IRI]
    class_edges: dict[str, set[str]] = {}
    for axiom in ont.axioms:
        if isinstance(axiom, SubClassOf):
            class_edges.setdefault(axiom.sub.iri, set()).add(axiom.sup.iri)

    rep_of, group_reach, closure = _closure_over_groups(class_nodes, class_edges)

    # Thing has no out-edges (never a sub side), so its group is always
    # the singleton {Thing}; every class reaches it.
    thing_rep = rep_of[OWL_THING_IRI]
    for rep in group_reach:
        group_reach[rep].add(thing_rep)
    for node in class_nodes:
        closure.add((node, OWL_THING_IRI))

    groups: dict[str, list[str]] = {}
    for node, rep in rep_of.items():
        groups.setdefault(rep, []).append(node)
    equiv_groups = tuple(
        tuple(sorted(members)) for rep, members in sorted(groups.items())
    )

    # transitive reduction over the condensation: a parent group is direct
    # when no other parent group reaches it
    direct_parents: dict[str, frozenset[str]] = {}
    for rep, reach in group_reach.items():
        parents = reach - {rep}
        direct = {
            candidate
            for candidate in parents
            if not any(
                candidate in group_reach[other]
                for other in parents
                if other != candidate
            )
        }
        for member in groups[rep]:
            direct_parents[member] = frozenset(direct)

    prop_nodes = sorted(ont.properties)
    prop_edges: dict[str, set[str]] = {}
    for axiom in ont.axioms:
        if isinstance(axiom, SubPropertyOf):
            prop_edges.setdefault(axiom.sub.iri, set()).add(axiom.sup.iri)
    _, _, property_closure = _closure_over_groups(prop_nodes, prop_edges)

    return InferredHierarchy(
        closure=frozenset(closure),
        equiv_groups=equiv_groups,
        direct_parents=direct_parents,
        property_closure=frozenset(property_closure),
        group_of=rep_of,
    )


def is_subsumed(h: InferredHierarchy, sub, sup) -> bool:
    return (h.require(sub), h.require(sup)) in h.closure


def infer_types(ont: Ontology, h: InferredHierarchy) -> list[ClassAssertion]:
    """Domain/range entailment: inferred ClassAssertions, closed upward
    under the hierarchy, minus anything already asserted.  Thing itself
    is never emitted (every individual is trivially a Thing)."""
    domains: dict[str, list[ClassId]] = {}
    ranges: dict[str, list[ClassId]] = {}
    for axiom in ont.axioms:
        if isinstance(axiom, Domain):
            domains.setdefault(axiom.prop.iri, []).append(axiom.cls)
        elif isinstance(axiom, Range):
            ranges.setdefault(axiom.prop.iri, []).append(axiom.cls)

    asserted = {
        (a.ind.iri, a.cls.iri) for a in ont.axioms if isinstance(a, ClassAssertion)
    }
    supers: dict[str, set[str]] = {}
    for sub, sup in h.closure:
        supers.setdefault(sub, set()).add(sup)

    inferred: set[tuple[str, str]] = set()

    def add(ind: IndividualId, cls: ClassId) -> None:
        for sup_iri in supers.get(cls.iri, {cls.iri}):
            if sup_iri == OWL_THING_IRI:
                continue
            if (ind.iri, sup_iri) not in asserted:
                inferred.add((ind.iri, sup_iri))

    for axiom in ont.axioms:
        if not isinstance(axiom, PropertyAssertion):
            continue
        related = {
            sup for sub, sup in h.property_closure if sub == axiom.prop.iri
        }
        for prop_iri in related:
            for cls in domains.get(prop_iri, ()):
                add(axiom.subj, cls)
            if isinstance(axiom.obj, IndividualId):
                for cls in ranges.get(prop_iri, ()):
                    add(axiom.obj, cls)

    def class_by_iri(iri: str) -> ClassId:
        return ont.classes[iri]

    return [
        ClassAssertion(ont.individuals[ind_iri], class_by_iri(cls_iri))
        for ind_iri, cls_iri in sorted(inferred)
    ]


@dataclass(frozen=True)
class ConsistencyEntry:
    kind: str  # "cardinality" | "redundancy"
    subject: tuple[str, ...]
    explanation: str


@dataclass(frozen=True)
class ConsistencyReport:
    violations: list[ConsistencyEntry]
    inferred_assertions: list[ClassAssertion]

    @property
    def is_consistent(self) -> bool:
        """Cardinality violations break consistency; redundancy entries
        are informative notes and do not."""
        return not any(v.kind == "cardinality" for v in self.violations)

    def to_json(self) -> str:
        payload = {
            "violations": [
                {
                    "kind": v.kind,
                    "subject": list(v.subject),
                    "explanation": v.explanation,
                }
                for v in self.violations
            ],
            "inferred_assertions": [
                {"individual": a.ind.iri, "class": a.cls.iri}
                for a in self.inferred_assertions
            ],
            "consistent": self.is_consistent,
        }
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _reachable(edges: dict[str, set[str]], start: str, goal: str) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in edges.get(node, ()):
            if nxt == goal:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def check_consistency(ont: Ontology, h: InferredHierarchy) -> ConsistencyReport:
    violations: list[ConsistencyEntry] = []
    inferred = infer_types(ont, h)

    # individual -> all types (asserted + inferred), upward closed
    types: dict[str, set[str]] = {}
    for axiom in ont.axioms:
        if isinstance(axiom, ClassAssertion):
            types.setdefault(axiom.ind.iri, set()).update(
                sup for sub, sup in h.closure if sub == axiom.cls.iri
            )
    for assertion in inferred:
        types.setdefault(assertion.ind.iri, set()).add(assertion.cls.iri)
    for ind_iri in ont.individuals:
        types.setdefault(ind_iri, set()).add(OWL_THING_IRI)

    # distinct property values per (individual, property), subproperties folded in
    values: dict[tuple[str, str], set[str]] = {}
    for axiom in ont.axioms:
        if not isinstance(axiom, PropertyAssertion):
            continue
        obj_key = (
            f"iri:{axiom.obj.iri}"
            if isinstance(axiom.obj, IndividualId)
            else f"lit:{axiom.obj}"
        )
        for sub, sup in h.property_closure:
            if sub == axiom.prop.iri:
                values.setdefault((axiom.subj.iri, sup), set()).add(obj_key)

    for axiom in sorted(
        (a for a in ont.axioms if isinstance(a, MaxCardinality)), key=repr
    ):
        for ind_iri, type_set in sorted(types.items()):
            if axiom.cls.iri not in type_set:
                continue
            count = len(values.get((ind_iri, axiom.prop.iri), ()))
            if count > axiom.n:
                violations.append(
                    ConsistencyEntry(
                        kind="cardinality",
                        subject=(ind_iri, axiom.prop.iri, axiom.cls.iri),
                        explanation=(
                            f"{ind_iri} has {count} distinct values for "
                            f"{axiom.prop.iri} but max cardinality is {axiom.n}"
                        ),
                    )
                )

    asserted_edges: dict[str, set[str]] = {}
    subclass_axioms = [a for a in ont.axioms if isinstance(a, SubClassOf)]
    for axiom in subclass_axioms:
        asserted_edges.setdefault(axiom.sub.iri, set()).add(axiom.sup.iri)
    for axiom in sorted(subclass_axioms, key=repr):
        if axiom.sup.iri == OWL_THING_IRI:
            redundant = True
        else:
            trimmed = {
                src: (dsts - {axiom.sup.iri} if src == axiom.sub.iri else dsts)
                for src, dsts in asserted_edges.items()
            }
            redundant = _reachable(trimmed, axiom.sub.iri, axiom.sup.iri)
        if redundant:
            violations.append(
                ConsistencyEntry(
                    kind="redundancy",
                    subject=(axiom.sub.iri, axiom.sup.iri),
                    explanation=(
                        f"asserted SubClassOf({axiom.sub.iri}, {axiom.sup.iri}) "
                        "is already implied by the other axioms"
                    ),
                )
            )

    return ConsistencyReport(violations=violations, inferred_assertions=inferred)
