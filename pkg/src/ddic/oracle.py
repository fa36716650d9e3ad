"""Brute-force reference for the engine, used by the test suite.

Computes extensions the slow way: ground every rule schema over the store,
run the deductive testimony rules to a fixpoint, apply the inheritance defaults
in every order (or a sample of orders), then run the deductive belief rules.
A default fires only if no atom in the current theory contradicts one of its
justifications, and every fired default is re-checked once the theory is final.

Atoms are plain tuples ``(layer, positive, modal, behavior, context, time)``
with layer ``"T"`` (testimony) or ``"B"`` (belief). Context entailment and
ontology reachability are borrowed from the production modules; the rule
machinery is not.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable

from .context import Formula, atoms_of, entails_ctx, equivalent
from .errors import OracleRefusal
from .model import BeliefAtom, Modal, NormStore
from .ontology import Ontology

MAX_NODES = 10
MAX_STATED = 8
MAX_CONTEXT_ATOMS = 4
EXHAUSTIVE_LIMIT = 6
SHUFFLES = 200

OBL, IMP, OPT = Modal.OBL, Modal.IMP, Modal.OPT

Tup = tuple  # (layer, positive, modal, behavior, context, time)


@dataclass(frozen=True)
class GroundInstance:
    rule: str
    bindings: tuple[tuple[str, object], ...]

    def binding(self) -> dict[str, object]:
        return dict(self.bindings)

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.bindings)
        return f"{self.rule}[{inner}]"


@dataclass(frozen=True)
class Extension:
    atoms: frozenset
    log: tuple[GroundInstance, ...]

    @property
    def beliefs(self) -> frozenset[BeliefAtom]:
        return frozenset(BeliefAtom(p, m, b, c, t) for layer, p, m, b, c, t in self.atoms
                         if layer == "B")


@dataclass(frozen=True)
class _Justification:
    """``literal(z, psi, t_x)`` plus side conditions; the default is blocked when
    the theory holds the complementary literal with all side conditions met."""
    positive: bool
    modal: Modal
    path: Callable[[Ontology, str, str, str], bool]  # (ont, a, b, z)


@dataclass(frozen=True)
class _Schema:
    name: str
    premise: tuple[bool, Modal]
    edge: Callable[[Ontology, str, str], bool]     # (ont, a, b)
    consequent: tuple[bool, Modal]
    justifications: tuple[_Justification, ...]


# The four inheritance defaults, transcribed one by one.
_SCHEMAS = (
    _Schema("R1", (True, OBL), lambda o, a, b: o.entails(a, b), (True, OBL),
            (_Justification(True, OBL, lambda o, a, b, z: o.entails(a, z)),)),
    _Schema("R2", (False, IMP), lambda o, a, b: o.entails(a, b), (False, IMP),
            (_Justification(False, IMP, lambda o, a, b, z: o.entails(a, z)),)),
    _Schema("R3", (True, IMP), lambda o, a, b: o.entails(b, a), (True, IMP),
            (_Justification(True, IMP, lambda o, a, b, z: o.entails(z, b) and o.entails(b, a)),
             _Justification(True, IMP, lambda o, a, b, y: o.entails(b, y) and o.entails(y, a)))),
    _Schema("R4", (False, OBL), lambda o, a, b: o.entails(b, a), (False, OBL),
            (_Justification(False, OBL, lambda o, a, b, z: o.entails(z, b) and o.entails(b, a)),
             _Justification(False, OBL, lambda o, a, b, y: o.entails(b, y) and o.entails(y, a)))),
)


def _testimony_step(theory: set) -> list[tuple[GroundInstance, Tup]]:
    """All deductive testimony conclusions not yet in ``theory``."""
    out = []
    for atom in theory:
        layer, pos, modal, a, phi, t = atom
        if layer != "T":
            continue
        inst = lambda rule: GroundInstance(rule, (("a", a), ("phi", phi), ("t", t)))
        if pos and modal is OPT:
            out.append((inst("D1a"), ("T", False, OBL, a, phi, t)))
            out.append((inst("D1a"), ("T", False, IMP, a, phi, t)))
        if pos and modal is OBL:
            out.append((inst("D1b"), ("T", False, IMP, a, phi, t)))
        if pos and modal is IMP:
            out.append((inst("D1b-contrapositive"), ("T", False, OBL, a, phi, t)))
        if not pos and modal is OBL:
            for other in theory:
                if (other[0] == "T" and not other[1] and other[2] is IMP and other[3] == a
                        and other[5] == t and equivalent(other[4], phi)):
                    out.append((inst("D1a"), ("T", True, OPT, a, phi, t)))
    return [(i, c) for i, c in out if c not in theory]


def _belief_step(theory: set) -> list[tuple[GroundInstance, Tup]]:
    out = []
    for atom in theory:
        layer, pos, modal, b, delta, t = atom
        if layer != "B":
            continue
        inst = lambda rule: GroundInstance(rule, (("b", b), ("delta", delta), ("t_n", t)))
        if pos and modal is OBL:
            out.append((inst("D1d"), ("B", False, IMP, b, delta, t)))
        if pos and modal is IMP:
            out.append((inst("D1d-contrapositive"), ("B", False, OBL, b, delta, t)))
        if not pos and modal is OBL and ("B", False, IMP, b, delta, t) in theory:
            out.append((inst("D1c"), ("B", True, OPT, b, delta, t)))
    return [(i, c) for i, c in out if c not in theory]


def _fixpoint(theory: set, log: list, step) -> None:
    while True:
        new = step(theory)
        if not new:
            return
        for inst, atom in new:
            if atom not in theory:
                theory.add(atom)
                log.append(inst)


@dataclass(frozen=True)
class _DefaultInstance:
    schema: _Schema
    premise: Tup
    target: str

    def ground(self, delta, t_n) -> GroundInstance:
        _, _, _, a, phi, t = self.premise
        return GroundInstance(self.schema.name, (
            ("a", a), ("b", self.target), ("phi", phi), ("t", t), ("delta", delta), ("t_n", t_n)))


def _prerequisites_hold(inst: _DefaultInstance, theory: set, ont: Ontology, delta, t_n) -> bool:
    _, _, _, a, phi, t = inst.premise
    return (inst.premise in theory and inst.schema.edge(ont, a, inst.target)
            and entails_ctx(delta, phi) and t <= t_n)


def _justified(inst: _DefaultInstance, theory: set, ont: Ontology, delta, t_n) -> bool:
    """True unless some atom of ``theory`` refutes one of the justifications."""
    _, _, _, a, _, t = inst.premise
    b = inst.target
    for j in inst.schema.justifications:
        for layer, pos, modal, z, psi, t_x in theory:
            if (layer == "T" and pos != j.positive and modal is j.modal
                    and t <= t_x <= t_n and j.path(ont, a, b, z) and entails_ctx(delta, psi)):
                return False
    return True


def _check_bounds(store: NormStore) -> None:
    if len(store.ontology.nodes) > MAX_NODES:
        raise OracleRefusal(f"more than {MAX_NODES} actions")
    if len(store.testimony) > MAX_STATED:
        raise OracleRefusal(f"more than {MAX_STATED} stated atoms")
    used = frozenset(store.context_atoms)
    for atom in store.testimony:
        used |= atoms_of(atom.context)
    if len(used) > MAX_CONTEXT_ATOMS:
        raise OracleRefusal(f"more than {MAX_CONTEXT_ATOMS} context atoms")


def _orders(items: list, seed: int) -> Iterable[tuple]:
    if len(items) <= EXHAUSTIVE_LIMIT:
        yield from itertools.permutations(items)
        return
    rng = random.Random(seed)
    yield tuple(items)
    yield tuple(reversed(items))
    for _ in range(SHUFFLES - 2):
        shuffled = list(items)
        rng.shuffle(shuffled)
        yield tuple(shuffled)


@dataclass(frozen=True)
class OracleRun:
    extensions: tuple[Extension, ...]
    # orders whose fired defaults were later refuted (not extensions at all)
    failures: tuple[tuple[GroundInstance, ...], ...] = ()
    orders_tried: int = 0


def naive_extensions(store: NormStore, delta: Formula, t_n: int, seed: int = 0) -> OracleRun:
    """All distinct extensions reached over the enumerated default orders."""
    _check_bounds(store)
    ont = store.ontology
    base: set = set()
    base_log: list = []
    for atom in store.testimony:
        if atom.time <= t_n:
            base.add(("T", True, atom.modal, atom.behavior, atom.context, atom.time))
    _fixpoint(base, base_log, _testimony_step)

    candidates = []
    for premise in sorted(base, key=repr):
        for schema in _SCHEMAS:
            if premise[0] == "T" and (premise[1], premise[2]) == schema.premise:
                for b in ont.nodes:
                    inst = _DefaultInstance(schema, premise, b)
                    if _prerequisites_hold(inst, base, ont, delta, t_n):
                        candidates.append(inst)

    found: dict[frozenset, Extension] = {}
    failures = []
    tried = 0
    for order in _orders(candidates, seed):
        tried += 1
        theory = set(base)
        log = list(base_log)
        fired: list[_DefaultInstance] = []
        changed = True
        while changed:
            changed = False
            for inst in order:
                if inst in fired or not _prerequisites_hold(inst, theory, ont, delta, t_n):
                    continue
                if not _justified(inst, theory, ont, delta, t_n):
                    continue
                consequent = ("B", *inst.schema.consequent, inst.target, delta, t_n)
                fired.append(inst)
                log.append(inst.ground(delta, t_n))
                theory.add(consequent)
                changed = True
        _fixpoint(theory, log, _belief_step)
        if not all(_justified(inst, theory, ont, delta, t_n) for inst in fired):
            failures.append(tuple(log))
            continue
        key = frozenset(theory)
        if key not in found:
            found[key] = Extension(key, tuple(log))
    return OracleRun(tuple(found.values()), tuple(failures), tried)


def naive_extension(store: NormStore, delta: Formula, t_n: int) -> Extension | set[Extension]:
    """The unique extension, or the set of all of them when orders disagree."""
    run = naive_extensions(store, delta, t_n)
    if len(run.extensions) == 1:
        return run.extensions[0]
    return set(run.extensions)


@dataclass(frozen=True)
class EquivalenceWitness:
    passed: bool
    reason: str
    engine_beliefs: frozenset[BeliefAtom] = frozenset()
    oracle_beliefs: frozenset[BeliefAtom] = frozenset()
    logs: tuple[tuple[GroundInstance, ...], ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def assert_engine_equivalence(store: NormStore, delta: Formula, t_n: int | None = None,
                              seed: int = 0) -> EquivalenceWitness:
    """Compare the engine's beliefs with the oracle's single extension."""
    from .engine import all_beliefs, derive_beliefs

    if t_n is None:
        t_n = store.max_time
    engine = all_beliefs(derive_beliefs(store, delta, t_n))
    run = naive_extensions(store, delta, t_n, seed)
    if run.failures:
        return EquivalenceWitness(False, "some default order produced a refuted default",
                                  engine, frozenset(), run.failures)
    if len(run.extensions) != 1:
        return EquivalenceWitness(False, f"{len(run.extensions)} distinct extensions", engine,
                                  frozenset(), tuple(e.log for e in run.extensions))
    oracle = run.extensions[0].beliefs
    if oracle != engine:
        return EquivalenceWitness(False, "belief sets differ", engine, oracle,
                                  (run.extensions[0].log,))
    return EquivalenceWitness(True, "ok", engine, oracle)
