"""Action ontology: an acyclic graph of ``specific -> general`` entailments.

Actions are identified by their declared names. Every snapshot precomputes the
reflexive-transitive closure in both directions, so ``entails`` is a set lookup.
Snapshots are immutable; ``add_action`` and ``add_entailment`` return new ones.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import CycleError, DeclarationError

ActionId = str


class RelationKind(Enum):
    EQUAL = "Equal"
    SPECIALIZES = "Specializes"
    GENERALIZES = "Generalizes"
    INTERSECTS = "Intersects"
    DISJOINT = "Disjoint"


@dataclass(frozen=True)
class BehaviorRelation:
    kind: RelationKind
    witness: ActionId | None = None

    def __str__(self) -> str:
        if self.kind is RelationKind.INTERSECTS:
            return f"Intersects({self.witness})"
        return self.kind.value


@dataclass(frozen=True)
class Ontology:
    nodes: tuple[ActionId, ...] = ()
    edges: frozenset[tuple[ActionId, ActionId]] = frozenset()
    _up: Mapping[ActionId, frozenset[ActionId]] = field(
        default=None, init=False, repr=False, compare=False)
    _down: Mapping[ActionId, frozenset[ActionId]] = field(
        default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        parents: dict[ActionId, set[ActionId]] = {n: set() for n in self.nodes}
        for specific, general in self.edges:
            parents[specific].add(general)
        up: dict[ActionId, frozenset[ActionId]] = {}
        for node in self.nodes:
            seen = {node}
            todo = [node]
            while todo:
                for nxt in parents[todo.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
            up[node] = frozenset(seen)
        down: dict[ActionId, set[ActionId]] = {n: set() for n in self.nodes}
        for node, ancestors in up.items():
            for anc in ancestors:
                down[anc].add(node)
        object.__setattr__(self, "_up", up)
        object.__setattr__(self, "_down", {n: frozenset(s) for n, s in down.items()})

    @classmethod
    def build(cls, names: Iterable[str], edges: Iterable[tuple[str, str]] = ()) -> "Ontology":
        ont = cls()
        for name in names:
            ont = ont.add_action(name)
        for specific, general in edges:
            ont = ont.add_entailment(specific, general)
        return ont

    def __contains__(self, name: object) -> bool:
        return name in self._up

    def require(self, *names: ActionId) -> None:
        for name in names:
            if name not in self._up:
                raise DeclarationError(f"undeclared action: {name}")

    def add_action(self, name: str) -> "Ontology":
        if not name:
            raise DeclarationError("action name must be non-empty")
        if name in self._up:
            raise DeclarationError(f"action already declared: {name}")
        return Ontology(self.nodes + (name,), self.edges)

    def add_entailment(self, specific: ActionId, general: ActionId) -> "Ontology":
        """Declare that doing ``specific`` counts as doing ``general``."""
        self.require(specific, general)
        if specific == general:
            raise CycleError([specific, general])
        if self.entails(general, specific):
            raise CycleError(self.path(general, specific) + [general])
        return Ontology(self.nodes, self.edges | {(specific, general)})

    def entails(self, a: ActionId, b: ActionId) -> bool:
        """Reflexive-transitive reachability from ``a`` to ``b``."""
        try:
            return b in self._up[a]
        except KeyError:
            self.require(a, b)
            raise

    def generalizations(self, a: ActionId) -> frozenset[ActionId]:
        """All ``b`` with ``a -> b`` (including ``a``)."""
        self.require(a)
        return self._up[a]

    def specializations(self, a: ActionId) -> frozenset[ActionId]:
        """All ``b`` with ``b -> a`` (including ``a``)."""
        self.require(a)
        return self._down[a]

    def between(self, a: ActionId, b: ActionId) -> frozenset[ActionId]:
        """Nodes on some entailment path from ``a`` to ``b``, endpoints included.

        Empty when ``a`` does not entail ``b``.
        """
        self.require(a, b)
        return self._up[a] & self._down[b]

    def path(self, a: ActionId, b: ActionId) -> list[ActionId]:
        """A shortest entailment path from ``a`` to ``b``; empty if none."""
        self.require(a, b)
        parents: dict[ActionId, list[ActionId]] = {n: [] for n in self.nodes}
        for specific, general in sorted(self.edges):
            parents[specific].append(general)
        prev: dict[ActionId, ActionId | None] = {a: None}
        queue = deque([a])
        while queue:
            node = queue.popleft()
            if node == b:
                out = [node]
                while prev[out[-1]] is not None:
                    out.append(prev[out[-1]])
                return out[::-1]
            for nxt in parents[node]:
                if nxt not in prev:
                    prev[nxt] = node
                    queue.append(nxt)
        return []

    def relate(self, a: ActionId, b: ActionId) -> BehaviorRelation:
        self.require(a, b)
        forward, backward = self.entails(a, b), self.entails(b, a)
        if a == b or (forward and backward):
            return BehaviorRelation(RelationKind.EQUAL)
        if forward:
            return BehaviorRelation(RelationKind.SPECIALIZES)
        if backward:
            return BehaviorRelation(RelationKind.GENERALIZES)
        common = self._down[a] & self._down[b]
        if common:
            return BehaviorRelation(RelationKind.INTERSECTS, min(common))
        return BehaviorRelation(RelationKind.DISJOINT)


def cooking_ontology() -> Ontology:
    """The six-action kitchen ontology used throughout the docs and tests.

    H = Help, C = Cook, HC = HelpCook, CV = CookVegetables,
    HCV = HelpCookVegetables, CP = CookPeppers.
    """
    return Ontology.build(
        ["H", "C", "HC", "CV", "HCV", "CP"],
        [("HC", "H"), ("HC", "C"), ("CV", "C"), ("HCV", "HC"), ("HCV", "CV"), ("CP", "CV")],
    )
