"""Norm-conflict detection and classification.

Two stated norms conflict when their behaviors overlap, their contexts can hold
together, and their modals differ. The overlap decides the kind:

* Direct: same behavior.
* Indirect: one behavior entails the other.
* Intersecting: neither entails the other but some behavior entails both.

Several of these are not real conflicts once inheritance is taken into account
(obligations only inherit upward, prohibitions only downward, and so on); those
are reported with ``genuine=False``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .context import Formula, check_declared, conjoin, consistent
from .errors import ContractViolation
from .model import Modal, NormStore, Origin, TestimonyAtom
from .ontology import ActionId, Ontology, RelationKind


class ConflictKind(Enum):
    DIRECT = "Direct"
    INDIRECT = "Indirect"
    INTERSECTING = "Intersecting"


@dataclass(frozen=True)
class ConflictReport:
    kind: ConflictKind
    first: TestimonyAtom
    second: TestimonyAtom
    shared_behavior: ActionId
    shared_context: Formula
    genuine: bool
    note: str


GENUINE_NOTE = "genuine conflict: the later norm defeats the earlier one on the shared grounds"

# (general modal, specific modal) -> why there is nothing to resolve
_NO_CONFLICT = {
    (Modal.OBL, Modal.OPT): "no actual conflict: obligations are not inherited downward",
    (Modal.OPT, Modal.IMP): "no actual conflict: the prohibition inherits downward and the "
                            "discretionary norm above it never reaches its grounds",
    (Modal.OBL, Modal.IMP): "no actual conflict: the obligation inherits upward, the "
                            "prohibition downward",
}
_INTERSECTING_NOTE = ("no actual conflict: inheritance never carries both evaluations "
                      "onto the intersection")


def classify_pair(ont: Ontology, n1: TestimonyAtom, n2: TestimonyAtom,
                  context_atoms=None) -> ConflictReport | None:
    """Classify two stated norms, or return None if they do not conflict.

    The report lists the earlier norm first (ties keep argument order).
    """
    for n in (n1, n2):
        if not n.positive or n.origin is not Origin.STATED:
            raise ContractViolation(f"only stated norms can conflict, got {n}")
    ont.require(n1.behavior, n2.behavior)
    check_declared([n1.context, n2.context], context_atoms)
    if n1.modal is n2.modal or not consistent(n1.context, n2.context):
        return None
    first, second = (n2, n1) if n2.time < n1.time else (n1, n2)
    relation = ont.relate(first.behavior, second.behavior)
    shared_context = conjoin(first.context, second.context)

    if relation.kind is RelationKind.DISJOINT:
        return None
    if relation.kind is RelationKind.EQUAL:
        return ConflictReport(ConflictKind.DIRECT, first, second, first.behavior,
                              shared_context, True, GENUINE_NOTE)
    if relation.kind is RelationKind.INTERSECTS:
        return ConflictReport(ConflictKind.INTERSECTING, first, second, relation.witness,
                              shared_context, False, _INTERSECTING_NOTE)
    if relation.kind is RelationKind.SPECIALIZES:
        specific, general = first, second
    else:
        specific, general = second, first
    note = _NO_CONFLICT.get((general.modal, specific.modal))
    return ConflictReport(ConflictKind.INDIRECT, first, second, specific.behavior,
                          shared_context, note is None, note or GENUINE_NOTE)


def scan_conflicts(store: NormStore) -> list[ConflictReport]:
    """Classify every unordered pair of stated norms."""
    stated = store.testimony
    reports = []
    for i, x in enumerate(stated):
        for y in stated[i + 1:]:
            report = classify_pair(store.ontology, x, y)
            if report is not None:
                reports.append(report)
    reports.sort(key=lambda r: (r.first.time, r.second.time, r.shared_behavior))
    return reports
