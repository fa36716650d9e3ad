"""Propositional context formulas.

Contexts are small propositional formulas over named atoms. Entailment and
consistency are decided by exhaustive truth tables: the set of satisfying rows
of a formula is packed into one Python integer (bit ``j`` set iff row ``j``
satisfies it), so connectives become bitwise operations.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Union

from .errors import DeclarationError

MAX_ATOMS = 16


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


Formula = Union[Top, Atom, Not, And, Or, Implies]

TOP = Top()

# binding strength used by the printer; higher binds tighter
_PRECEDENCE = {Implies: 1, Or: 2, And: 3, Not: 4, Atom: 5, Top: 5}


def render(f: Formula) -> str:
    """Print ``f`` with the minimum parentheses needed to parse back to ``f``.

    ``&`` and ``|`` associate to the left, ``->`` to the right.
    """
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        inner = render(f.arg)
        if _PRECEDENCE[type(f.arg)] < _PRECEDENCE[Not]:
            inner = f"({inner})"
        return "!" + inner
    op = {And: "&", Or: "|", Implies: "->"}[type(f)]
    mine = _PRECEDENCE[type(f)]
    left, right = render(f.left), render(f.right)
    lp, rp = _PRECEDENCE[type(f.left)], _PRECEDENCE[type(f.right)]
    if isinstance(f, Implies):
        if lp <= mine:
            left = f"({left})"
        if rp < mine:
            right = f"({right})"
    else:
        if lp < mine:
            left = f"({left})"
        if rp <= mine:
            right = f"({right})"
    return f"{left} {op} {right}"


@lru_cache(maxsize=None)
def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Top):
        return frozenset()
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Not):
        return atoms_of(f.arg)
    return atoms_of(f.left) | atoms_of(f.right)


def evaluate(f: Formula, assignment: Mapping[str, bool]) -> bool:
    """Truth value of ``f`` under one assignment of its atoms."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Atom):
        return assignment[f.name]
    if isinstance(f, Not):
        return not evaluate(f.arg, assignment)
    if isinstance(f, And):
        return evaluate(f.left, assignment) and evaluate(f.right, assignment)
    if isinstance(f, Or):
        return evaluate(f.left, assignment) or evaluate(f.right, assignment)
    return (not evaluate(f.left, assignment)) or evaluate(f.right, assignment)


def check_declared(formulas: Iterable[Formula], declared: Iterable[str] | None) -> None:
    """Raise :class:`DeclarationError` if a formula mentions an undeclared atom."""
    if declared is None:
        return
    declared = frozenset(declared)
    for f in formulas:
        missing = atoms_of(f) - declared
        if missing:
            raise DeclarationError(f"undeclared context atom(s): {', '.join(sorted(missing))}")


@lru_cache(maxsize=None)
def _atom_column(index: int, width: int) -> int:
    # rows where atom `index` is true, over 2**width rows
    block = 1 << index
    column = ((1 << block) - 1) << block
    period = block * 2
    rows = 1 << width
    while period < rows:
        column |= column << period
        period *= 2
    return column & ((1 << rows) - 1)


@lru_cache(maxsize=65536)
def _models(f: Formula, universe: tuple[str, ...]) -> int:
    width = len(universe)
    full = (1 << (1 << width)) - 1
    if isinstance(f, Top):
        return full
    if isinstance(f, Atom):
        return _atom_column(universe.index(f.name), width)
    if isinstance(f, Not):
        return full ^ _models(f.arg, universe)
    left, right = _models(f.left, universe), _models(f.right, universe)
    if isinstance(f, And):
        return left & right
    if isinstance(f, Or):
        return left | right
    return (full ^ left) | right


def _universe(*formulas: Formula) -> tuple[str, ...]:
    names: frozenset[str] = frozenset()
    for f in formulas:
        names |= atoms_of(f)
    if len(names) > MAX_ATOMS:
        raise DeclarationError(f"more than {MAX_ATOMS} context atoms in one check")
    return tuple(sorted(names))


def entails_ctx(premise: Formula, conclusion: Formula, declared: Iterable[str] | None = None) -> bool:
    """Classical consequence: every row satisfying ``premise`` satisfies ``conclusion``."""
    check_declared((premise, conclusion), declared)
    return _entails(premise, conclusion)


@lru_cache(maxsize=65536)
def _entails(premise: Formula, conclusion: Formula) -> bool:
    universe = _universe(premise, conclusion)
    full = (1 << (1 << len(universe))) - 1
    return _models(premise, universe) & (full ^ _models(conclusion, universe)) == 0


def consistent(first: Formula, second: Formula, declared: Iterable[str] | None = None) -> bool:
    """True iff ``first & second`` has a satisfying row."""
    check_declared((first, second), declared)
    universe = _universe(first, second)
    return _models(first, universe) & _models(second, universe) != 0


def satisfiable(f: Formula, declared: Iterable[str] | None = None) -> bool:
    return consistent(f, TOP, declared)


def equivalent(first: Formula, second: Formula) -> bool:
    return _entails(first, second) and _entails(second, first)


def conjoin(first: Formula, second: Formula, declared: Iterable[str] | None = None) -> Formula:
    check_declared((first, second), declared)
    return And(first, second)
