"""Shared vocabulary: modals, testimony and belief atoms, status labels, traces, stores.

Testimony atoms are what an agent *said* (rendered lowercase, ``obl(HC, Monday, 1)``);
belief atoms are what we infer the agent *believes* (capitalized,
``Obl(HC, Monday & Morning, 3)``). Negation is a polarity flag rendered as ``~``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, TypeVar

from .context import MAX_ATOMS, Formula, check_declared, render
from .errors import ContractViolation, DeclarationError
from .ontology import ActionId, Ontology


class Modal(Enum):
    OBL = "Obl"
    IMP = "Imp"
    OPT = "Opt"

    @property
    def keyword(self) -> str:
        return self.value.lower()


class Origin(Enum):
    STATED = "stated"
    DERIVED = "derived"


@dataclass(frozen=True)
class TestimonyAtom:
    positive: bool
    modal: Modal
    behavior: ActionId
    context: Formula
    time: int
    # provenance only; two atoms with the same content are the same atom
    origin: Origin = field(default=Origin.STATED, compare=False)

    def __post_init__(self):
        if self.time < 0:
            raise ContractViolation(f"negative timestamp {self.time}")
        if self.origin is Origin.STATED and not self.positive:
            raise ContractViolation("stated testimony is always positive")

    def __str__(self) -> str:
        sign = "" if self.positive else "~"
        return f"{sign}{self.modal.keyword}({self.behavior}, {render(self.context)}, {self.time})"


@dataclass(frozen=True)
class BeliefAtom:
    positive: bool
    modal: Modal
    behavior: ActionId
    context: Formula
    time: int

    def __str__(self) -> str:
        sign = "" if self.positive else "~"
        return f"{sign}{self.modal.value}({self.behavior}, {render(self.context)}, {self.time})"

    @property
    def triple(self) -> tuple[ActionId, Formula, int]:
        return (self.behavior, self.context, self.time)


AtomT = TypeVar("AtomT", TestimonyAtom, BeliefAtom)


def complement(atom: AtomT) -> AtomT:
    """Flip polarity; every other field is kept."""
    if isinstance(atom, TestimonyAtom):
        # a flipped stated atom is no longer something anybody said
        return dataclasses.replace(atom, positive=not atom.positive, origin=Origin.DERIVED)
    return dataclasses.replace(atom, positive=not atom.positive)


class StatusLabel(Enum):
    OBLIGATORY = "Obligatory"
    IMPERMISSIBLE = "Impermissible"
    OPTIONAL = "Optional"
    NON_OBLIGATORY = "NonObligatory"
    NON_IMPERMISSIBLE = "NonImpermissible"
    UNKNOWN = "Unknown"
    INCONSISTENT = "Inconsistent"


def label_of(beliefs: Iterable[BeliefAtom]) -> StatusLabel:
    """Summarize the beliefs held about one (behavior, context, time) triple.

    Precedence: Inconsistent, positive Obl, positive Imp, Optional (both negatives),
    a lone negative, Unknown.
    """
    beliefs = frozenset(beliefs)
    if len({b.triple for b in beliefs}) > 1:
        raise ContractViolation("label_of needs beliefs about a single triple")
    if any(complement(b) in beliefs for b in beliefs):
        return StatusLabel.INCONSISTENT
    signs = {(b.positive, b.modal) for b in beliefs}
    if (True, Modal.OBL) in signs:
        return StatusLabel.OBLIGATORY
    if (True, Modal.IMP) in signs:
        return StatusLabel.IMPERMISSIBLE
    non_obl, non_imp = (False, Modal.OBL) in signs, (False, Modal.IMP) in signs
    if non_obl and non_imp:
        return StatusLabel.OPTIONAL
    if (True, Modal.OPT) in signs:
        raise ContractViolation("positive Opt without ~Obl and ~Imp is not belief-closed")
    if non_obl:
        return StatusLabel.NON_OBLIGATORY
    if non_imp:
        return StatusLabel.NON_IMPERMISSIBLE
    return StatusLabel.UNKNOWN


@dataclass(frozen=True)
class DefeatRecord:
    """One defeater that blocked a default: which rule, what blocked it, and why.

    ``path`` realizes the entailment side condition: ``(a, z)`` for the upward
    rules, ``(z, b, a)`` or ``(b, y, a)`` for the downward ones (``justification``
    says which). ``window`` is ``(t, t_x, t_n)``.
    """
    rule: str
    stated: TestimonyAtom
    defeater: TestimonyAtom
    path: tuple[ActionId, ...]
    window: tuple[int, int, int]
    justification: int = 1

    def __post_init__(self):
        t, tx, tn = self.window
        if not t <= tx <= tn:
            raise ContractViolation(f"defeat window out of order: {self.window}")


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    premises: tuple[TestimonyAtom | BeliefAtom, ...]
    side_conditions: tuple[str, ...] = ()


@dataclass(frozen=True)
class DerivationTrace:
    conclusion: BeliefAtom
    blocked: bool
    applications: tuple[RuleApplication, ...]
    defeats: tuple[DefeatRecord, ...] = ()

    def __post_init__(self):
        if self.blocked != bool(self.defeats):
            raise ContractViolation("blocked conclusions carry defeats, derived ones none")


@dataclass(frozen=True)
class NormStore:
    """An ontology, the declared context atoms, and everything stated so far.

    Testimony is kept in (time, insertion) order. ``state`` returns a new snapshot.
    """
    ontology: Ontology
    context_atoms: frozenset[str] = frozenset()
    testimony: tuple[TestimonyAtom, ...] = ()

    def __post_init__(self):
        if len(self.context_atoms) > MAX_ATOMS:
            raise DeclarationError(f"at most {MAX_ATOMS} context atoms may be declared")
        for atom in self.testimony:
            self._validate(atom)
        ordered = tuple(sorted(self.testimony, key=lambda a: a.time))
        object.__setattr__(self, "testimony", ordered)

    def _validate(self, atom: TestimonyAtom) -> None:
        if atom.origin is not Origin.STATED:
            raise ContractViolation("only stated atoms belong in a store")
        self.ontology.require(atom.behavior)
        check_declared([atom.context], self.context_atoms)

    def state(self, modal: Modal, behavior: ActionId, context: Formula, time: int) -> "NormStore":
        atom = TestimonyAtom(True, modal, behavior, context, time)
        return dataclasses.replace(self, testimony=self.testimony + (atom,))

    def with_context_atoms(self, *names: str) -> "NormStore":
        clash = set(names) & self.context_atoms
        if clash:
            raise DeclarationError(f"context atom already declared: {', '.join(sorted(clash))}")
        return dataclasses.replace(self, context_atoms=self.context_atoms | frozenset(names))

    @property
    def max_time(self) -> int:
        return max((a.time for a in self.testimony), default=0)
