"""Inference: testimony closure, defeasible inheritance, belief closure.

Evaluation runs in three strict stages:

1. testimony closure over everything stated up to the query time,
2. the four inheritance defaults, each checked against the closed testimony
   for defeaters,
3. belief closure per (behavior, context, time) triple.

Defaults never consult each other's conclusions, so the order in which stage 2
attempts them is irrelevant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .context import Formula, check_declared, entails_ctx, equivalent, render
from .errors import ContractViolation
from .model import (BeliefAtom, DefeatRecord, DerivationTrace, Modal, NormStore, Origin,
                    RuleApplication, StatusLabel, TestimonyAtom, label_of)
from .ontology import ActionId, Ontology


# --- stage 1: testimony closure -------------------------------------------------

@dataclass(frozen=True)
class ClosedTestimony:
    ontology: Ontology
    atoms: tuple[TestimonyAtom, ...]
    contradictions: tuple[tuple[TestimonyAtom, TestimonyAtom], ...]
    # derived atom -> the deductive step that first produced it
    sources: Mapping[TestimonyAtom, RuleApplication] = field(default_factory=dict)

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms


def _same_triple(x: TestimonyAtom, y: TestimonyAtom) -> bool:
    return x.behavior == y.behavior and x.time == y.time and equivalent(x.context, y.context)


def close_testimony(store: NormStore, t_n: int | None = None) -> ClosedTestimony:
    """Close the stated testimony (optionally only that with time <= ``t_n``).

    Opt splits into ~Obl and ~Imp, and back again when both negatives meet on a
    triple; Obl yields ~Imp; Imp yields ~Obl. Complementary pairs are recorded,
    never exploded.
    """
    stated = [a for a in store.testimony if t_n is None or a.time <= t_n]
    atoms: dict[TestimonyAtom, None] = {}
    sources: dict[TestimonyAtom, RuleApplication] = {}
    todo: list[TestimonyAtom] = []

    def add(atom: TestimonyAtom, rule: str | None = None, *premises: TestimonyAtom) -> None:
        if atom in atoms:
            return
        atoms[atom] = None
        if rule is not None:
            sources[atom] = RuleApplication(rule, premises)
        todo.append(atom)

    for atom in stated:
        add(atom)
    while todo:
        x = todo.pop(0)
        derived = lambda positive, modal: TestimonyAtom(
            positive, modal, x.behavior, x.context, x.time, Origin.DERIVED)
        if x.positive and x.modal is Modal.OPT:
            add(derived(False, Modal.OBL), "D1a", x)
            add(derived(False, Modal.IMP), "D1a", x)
        elif x.positive and x.modal is Modal.OBL:
            add(derived(False, Modal.IMP), "D1b", x)
        elif x.positive and x.modal is Modal.IMP:
            add(derived(False, Modal.OBL), "D1b-contrapositive", x)
        elif not x.positive and x.modal in (Modal.OBL, Modal.IMP):
            other = Modal.IMP if x.modal is Modal.OBL else Modal.OBL
            for y in list(atoms):
                if not y.positive and y.modal is other and _same_triple(x, y):
                    non_obl = x if x.modal is Modal.OBL else y
                    non_imp = y if non_obl is x else x
                    add(TestimonyAtom(True, Modal.OPT, non_obl.behavior, non_obl.context,
                                      non_obl.time, Origin.DERIVED), "D1a", non_obl, non_imp)
                    break

    closed = tuple(atoms)
    contradictions = tuple(
        (x, y) for i, x in enumerate(closed) for y in closed[i + 1:]
        if x.modal is y.modal and x.positive != y.positive and _same_triple(x, y))
    return ClosedTestimony(store.ontology, closed, contradictions, sources)


# --- stage 2: defeasible inheritance --------------------------------------------

@dataclass(frozen=True)
class _Default:
    name: str
    premise: tuple[bool, Modal]
    upward: bool                  # True: a -> b; False: b -> a
    defeater: tuple[bool, Modal]  # the complement of the justification literal


DEFAULTS = {
    "R1": _Default("R1", (True, Modal.OBL), True, (False, Modal.OBL)),
    "R2": _Default("R2", (False, Modal.IMP), True, (True, Modal.IMP)),
    "R3": _Default("R3", (True, Modal.IMP), False, (False, Modal.IMP)),
    "R4": _Default("R4", (False, Modal.OBL), False, (True, Modal.OBL)),
}
_BY_PREMISE = {d.premise: d for d in DEFAULTS.values()}


@dataclass(frozen=True)
class Derived:
    belief: BeliefAtom
    trace: DerivationTrace


@dataclass(frozen=True)
class Defeated:
    trace: DerivationTrace


@dataclass(frozen=True)
class NotApplicable:
    reason: str


RuleOutcome = Union[Derived, Defeated, NotApplicable]


def default_for(atom: TestimonyAtom) -> str | None:
    """Name of the inheritance default whose premise has ``atom``'s shape."""
    d = _BY_PREMISE.get((atom.positive, atom.modal))
    return d.name if d else None


def _defeat_path(ont: Ontology, rule: _Default, a: ActionId, b: ActionId,
                 z: ActionId) -> tuple[tuple[ActionId, ...], int] | None:
    if rule.upward:
        return ((a, z), 1) if ont.entails(a, z) else None
    if ont.entails(z, b) and ont.entails(b, a):
        return (z, b, a), 1
    if ont.entails(b, z) and ont.entails(z, a):
        return (b, z, a), 2
    return None


def _try(rule: _Default, ct: ClosedTestimony, stated: TestimonyAtom, target: ActionId,
         delta: Formula, t_n: int) -> RuleOutcome:
    if (stated.positive, stated.modal) != rule.premise:
        raise ContractViolation(f"{rule.name} does not take {stated} as premise")
    ont = ct.ontology
    a, b = stated.behavior, target
    edge_ok = ont.entails(a, b) if rule.upward else ont.entails(b, a)
    if not edge_ok:
        arrow = f"{a} -> {b}" if rule.upward else f"{b} -> {a}"
        return NotApplicable(f"no entailment {arrow}")
    if not entails_ctx(delta, stated.context):
        return NotApplicable(f"{render(delta)} does not entail {render(stated.context)}")
    if stated.time > t_n:
        return NotApplicable(f"testimony at {stated.time} is after {t_n}")

    defeats = []
    for z in ct.atoms:
        if (z.positive, z.modal) != rule.defeater or not stated.time <= z.time <= t_n:
            continue
        found = _defeat_path(ont, rule, a, b, z.behavior)
        if found is None or not entails_ctx(delta, z.context):
            continue
        path, which = found
        defeats.append(DefeatRecord(rule.name, stated, z, path, (stated.time, z.time, t_n), which))

    positive, modal = rule.premise
    conclusion = BeliefAtom(positive, modal, b, delta, t_n)
    arrow = f"{a} -> {b}" if rule.upward else f"{b} -> {a}"
    side = (arrow, f"{render(delta)} -> {render(stated.context)}", f"{stated.time} <= {t_n}")
    application = RuleApplication(rule.name, (stated,), side)
    if defeats:
        return Defeated(DerivationTrace(conclusion, True, (application,), tuple(defeats)))
    return Derived(conclusion, DerivationTrace(conclusion, False, (application,)))


def try_inherit(ct: ClosedTestimony, stated: TestimonyAtom, target: ActionId,
                delta: Formula, t_n: int) -> RuleOutcome:
    """Attempt whichever default matches the shape of ``stated``."""
    name = default_for(stated)
    if name is None:
        return NotApplicable(f"no inheritance default takes {stated}")
    return _try(DEFAULTS[name], ct, stated, target, delta, t_n)


def try_inherit_obl(ct, stated, target, delta, t_n) -> RuleOutcome:
    """Obligations inherit upward to more general behaviors."""
    return _try(DEFAULTS["R1"], ct, stated, target, delta, t_n)


def try_inherit_nonimp(ct, stated, target, delta, t_n) -> RuleOutcome:
    """Non-impermissibility inherits upward."""
    return _try(DEFAULTS["R2"], ct, stated, target, delta, t_n)


def try_inherit_imp(ct, stated, target, delta, t_n) -> RuleOutcome:
    """Prohibitions inherit downward; exceptions come from below along the path."""
    return _try(DEFAULTS["R3"], ct, stated, target, delta, t_n)


def try_inherit_nonobl(ct, stated, target, delta, t_n) -> RuleOutcome:
    """Non-obligation inherits downward."""
    return _try(DEFAULTS["R4"], ct, stated, target, delta, t_n)


def ground_defaults(ct: ClosedTestimony) -> list[tuple[TestimonyAtom, ActionId]]:
    """Every (premise, target) pair a default could fire on, in a fixed order."""
    return [(atom, node) for atom in ct.atoms if default_for(atom)
            for node in ct.ontology.nodes]


# --- stage 3: belief closure and reports ----------------------------------------

@dataclass(frozen=True)
class StatusReport:
    behavior: ActionId
    context: Formula
    time: int
    label: StatusLabel
    beliefs: frozenset[BeliefAtom]
    traces: tuple[DerivationTrace, ...] = ()
    diagnostics: tuple[str, ...] = ()

    def sorted_beliefs(self) -> list[BeliefAtom]:
        order = {Modal.OBL: 0, Modal.IMP: 1, Modal.OPT: 2}
        return sorted(self.beliefs, key=lambda b: (order[b.modal], not b.positive))


def _close_beliefs(beliefs: dict[BeliefAtom, None], traces: list[DerivationTrace]) -> None:
    changed = True
    while changed:
        changed = False
        for x in list(beliefs):
            steps = []
            if x.positive and x.modal is Modal.OBL:
                steps.append(("D1d", BeliefAtom(False, Modal.IMP, *x.triple), (x,)))
            if x.positive and x.modal is Modal.IMP:
                steps.append(("D1d-contrapositive", BeliefAtom(False, Modal.OBL, *x.triple), (x,)))
            if not x.positive and x.modal is Modal.OBL:
                other = BeliefAtom(False, Modal.IMP, *x.triple)
                if other in beliefs:
                    steps.append(("D1c", BeliefAtom(True, Modal.OPT, *x.triple), (x, other)))
            for rule, new, premises in steps:
                if new not in beliefs:
                    beliefs[new] = None
                    traces.append(DerivationTrace(new, False, (RuleApplication(rule, premises),)))
                    changed = True


@dataclass(frozen=True)
class Diagnostic:
    message: str
    behaviors: frozenset[ActionId]


def store_diagnostics(store: NormStore, t_n: int | None = None) -> list[Diagnostic]:
    """Same-time contradictions: the cases the temporal ordering cannot resolve."""
    from .conflict import classify_pair

    if t_n is None:
        t_n = store.max_time
    ont = store.ontology
    ct = close_testimony(store, t_n)
    out = []
    for x, y in ct.contradictions:
        related = ont.specializations(x.behavior) | ont.generalizations(x.behavior)
        out.append(Diagnostic(f"contradictory testimony {x} and {y}", related))
    stated = [a for a in store.testimony if a.time <= t_n]
    for i, x in enumerate(stated):
        for y in stated[i + 1:]:
            if x.time != y.time:
                continue
            report = classify_pair(ont, x, y)
            if report is not None and report.genuine:
                grounds = ont.specializations(x.behavior) & ont.specializations(y.behavior)
                out.append(Diagnostic(
                    f"simultaneous {report.kind.value.lower()} conflict at time {x.time} between "
                    f"{x} and {y}; shared grounds left unresolved", grounds))
    return out


def evaluate_defaults(ct: ClosedTestimony, instances: Iterable[tuple[TestimonyAtom, ActionId]],
                      delta: Formula, t_n: int
                      ) -> tuple[dict[ActionId, dict[BeliefAtom, None]],
                                 dict[ActionId, list[DerivationTrace]]]:
    beliefs: dict[ActionId, dict[BeliefAtom, None]] = {n: {} for n in ct.ontology.nodes}
    traces: dict[ActionId, list[DerivationTrace]] = {n: [] for n in ct.ontology.nodes}
    for atom, target in instances:
        outcome = try_inherit(ct, atom, target, delta, t_n)
        if isinstance(outcome, Derived):
            beliefs[target][outcome.belief] = None
            traces[target].append(outcome.trace)
        elif isinstance(outcome, Defeated):
            traces[target].append(outcome.trace)
    return beliefs, traces


def derive_beliefs(store: NormStore, delta: Formula, t_n: int | None = None,
                   instances: Iterable[tuple[TestimonyAtom, ActionId]] | None = None
                   ) -> dict[ActionId, StatusReport]:
    """One status report per ontology node for context ``delta`` at time ``t_n``.

    ``t_n`` defaults to the latest stated timestamp. ``instances`` overrides the
    default-attempt order and exists for order-independence testing.
    """
    if t_n is None:
        t_n = store.max_time
    if t_n < 0:
        raise ContractViolation(f"negative query time {t_n}")
    check_declared([delta], store.context_atoms)
    ct = close_testimony(store, t_n)
    if instances is None:
        instances = ground_defaults(ct)
    beliefs, traces = evaluate_defaults(ct, instances, delta, t_n)
    diagnostics = store_diagnostics(store, t_n)

    reports = {}
    for node in store.ontology.nodes:
        held = beliefs[node]
        node_traces = traces[node]
        _close_beliefs(held, node_traces)
        notes = tuple(d.message for d in diagnostics if node in d.behaviors)
        reports[node] = StatusReport(node, delta, t_n, label_of(held), frozenset(held),
                                     tuple(node_traces), notes)
    return reports


def query_status(store: NormStore, behavior: ActionId, delta: Formula,
                 t_n: int | None = None) -> StatusReport:
    store.ontology.require(behavior)
    return derive_beliefs(store, delta, t_n)[behavior]


def all_beliefs(reports: Mapping[ActionId, StatusReport]) -> frozenset[BeliefAtom]:
    out: set[BeliefAtom] = set()
    for report in reports.values():
        out |= report.beliefs
    return frozenset(out)
