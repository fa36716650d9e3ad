"""Reader and writer for ``.ddic`` scripts.

One statement per line; ``#`` starts a comment::

    action HC
    action C
    entails HC -> C            # HC is the more specific action
    context Monday
    context Morning
    @1 obl(HC, Monday)
    @2 imp(HC, Morning)
    query @3 (HC, Monday & Morning)
    expect @3 Imp(HC, Monday & Morning)
    expect not @3 Obl(C, Monday & Morning)
    expect @3 ~Obl(HC, Monday & Morning)

Context formulas use ``true``, ``!``, ``&``, ``|`` and ``->`` (tightest first;
``->`` associates to the right). Declarations may appear anywhere in the file;
names are resolved after the whole script has been read.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .context import MAX_ATOMS, TOP, And, Atom, Formula, Implies, Not, Or, atoms_of, render
from .errors import ParseError
from .model import BeliefAtom, Modal, NormStore, TestimonyAtom
from .ontology import Ontology

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<nat>[0-9]+)|(?P<sym>->|[@(),&|!~]))")
_TESTIMONY_MODALS = {m.keyword: m for m in Modal}
_BELIEF_MODALS = {m.value: m for m in Modal}


@dataclass(frozen=True)
class Testimony:
    time: int
    modal: Modal
    behavior: str
    context: Formula
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"@{self.time} {self.modal.keyword}({self.behavior}, {render(self.context)})"

    def atom(self) -> TestimonyAtom:
        return TestimonyAtom(True, self.modal, self.behavior, self.context, self.time)


@dataclass(frozen=True)
class Query:
    time: int
    behavior: str
    context: Formula
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"query @{self.time} ({self.behavior}, {render(self.context)})"


@dataclass(frozen=True)
class Expectation:
    present: bool
    positive: bool
    modal: Modal
    behavior: str
    context: Formula
    time: int
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        neg = "not " if not self.present else ""
        sign = "" if self.positive else "~"
        return (f"expect {neg}@{self.time} {sign}{self.modal.value}"
                f"({self.behavior}, {render(self.context)})")

    def atom(self) -> BeliefAtom:
        return BeliefAtom(self.positive, self.modal, self.behavior, self.context, self.time)


@dataclass(frozen=True)
class Script:
    actions: tuple[str, ...] = ()
    entailments: tuple[tuple[str, str], ...] = ()
    contexts: tuple[str, ...] = ()
    testimony: tuple[Testimony, ...] = ()
    queries: tuple[Query, ...] = ()
    expectations: tuple[Expectation, ...] = ()

    def __post_init__(self):
        # canonical order, so that formatting and re-parsing is the identity
        object.__setattr__(self, "actions", tuple(sorted(self.actions)))
        object.__setattr__(self, "entailments", tuple(sorted(self.entailments)))
        object.__setattr__(self, "contexts", tuple(sorted(self.contexts)))
        object.__setattr__(self, "testimony", tuple(sorted(self.testimony, key=lambda t: t.time)))
        object.__setattr__(self, "queries", tuple(self.queries))
        object.__setattr__(self, "expectations", tuple(self.expectations))

    def ontology(self) -> Ontology:
        return Ontology.build(self.actions, self.entailments)

    def store(self) -> NormStore:
        return NormStore(self.ontology(), frozenset(self.contexts),
                         tuple(t.atom() for t in self.testimony))


@dataclass
class _Token:
    kind: str  # "id", "nat", "sym" or "eol"
    text: str
    column: int

    def describe(self) -> str:
        return "end of line" if self.kind == "eol" else f"'{self.text}'"


def _tokenize(text: str, line: int) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos] in " \t":
            pos += 1
        if pos >= len(text) or text[pos] == "#":
            tokens.append(_Token("eol", "", pos + 1))
            return tokens
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos + 1, "a token", f"'{text[pos]}'")
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()


class _LineParser:
    def __init__(self, text: str, line: int):
        self.line = line
        self.tokens = _tokenize(text, line)
        self.pos = 0
        # (kind, name, line, column) for every identifier used, in order of appearance
        self.refs: list[tuple[str, str, int, int]] = []

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def fail(self, expected: str):
        raise ParseError(self.line, self.tok.column, expected, self.tok.describe())

    def sym(self, text: str) -> _Token:
        if self.tok.kind != "sym" or self.tok.text != text:
            self.fail(f"'{text}'")
        return self.advance()

    def advance(self) -> _Token:
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self, what: str) -> _Token:
        if self.tok.kind != "id":
            self.fail(what)
        return self.advance()

    def nat(self) -> int:
        if self.tok.kind != "nat":
            self.fail("a natural number")
        return int(self.advance().text)

    def end(self) -> None:
        if self.tok.kind != "eol":
            self.fail("end of line")

    def action_ref(self) -> str:
        tok = self.ident("an action name")
        self.refs.append(("action", tok.text, self.line, tok.column))
        return tok.text

    # ctx := disj ["->" ctx]
    def ctx(self) -> Formula:
        left = self.disj()
        if self.tok.kind == "sym" and self.tok.text == "->":
            self.advance()
            return Implies(left, self.ctx())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.tok.kind == "sym" and self.tok.text == "|":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.tok.kind == "sym" and self.tok.text == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.tok.kind == "sym" and self.tok.text == "!":
            self.advance()
            return Not(self.unary())
        if self.tok.kind == "sym" and self.tok.text == "(":
            self.advance()
            f = self.ctx()
            self.sym(")")
            return f
        if self.tok.kind == "id":
            tok = self.advance()
            if tok.text == "true":
                return TOP
            self.refs.append(("context", tok.text, self.line, tok.column))
            return Atom(tok.text)
        self.fail("a context formula")

    def behavior_and_context(self) -> tuple[str, Formula]:
        self.sym("(")
        behavior = self.action_ref()
        self.sym(",")
        context = self.ctx()
        self.sym(")")
        return behavior, context


@dataclass
class _Parsed:
    actions: list = field(default_factory=list)       # (name, line, column)
    entailments: list = field(default_factory=list)   # (specific, general, line, column)
    contexts: list = field(default_factory=list)      # (name, line, column)
    testimony: list = field(default_factory=list)
    queries: list = field(default_factory=list)
    expectations: list = field(default_factory=list)
    refs: list = field(default_factory=list)


def _parse_line(text: str, line: int, out: _Parsed) -> None:
    p = _LineParser(text, line)
    tok = p.tok
    if tok.kind == "eol":
        return
    if tok.kind == "sym" and tok.text == "@":
        p.advance()
        time = p.nat()
        kw = p.tok
        if kw.kind != "id" or kw.text not in _TESTIMONY_MODALS:
            p.fail("'obl', 'imp' or 'opt'")
        p.advance()
        behavior, context = p.behavior_and_context()
        p.end()
        out.testimony.append(Testimony(time, _TESTIMONY_MODALS[kw.text], behavior, context, line))
    elif tok.kind == "id" and tok.text == "action":
        p.advance()
        name = p.ident("an action name")
        p.end()
        out.actions.append((name.text, line, name.column))
    elif tok.kind == "id" and tok.text == "context":
        p.advance()
        name = p.ident("a context name")
        if name.text == "true":
            p.pos -= 1
            p.fail("a context name other than 'true'")
        p.end()
        out.contexts.append((name.text, line, name.column))
    elif tok.kind == "id" and tok.text == "entails":
        p.advance()
        specific = p.action_ref()
        col = p.tokens[p.pos - 1].column
        p.sym("->")
        general = p.action_ref()
        p.end()
        out.entailments.append((specific, general, line, col))
    elif tok.kind == "id" and tok.text == "query":
        p.advance()
        p.sym("@")
        time = p.nat()
        behavior, context = p.behavior_and_context()
        p.end()
        out.queries.append(Query(time, behavior, context, line))
    elif tok.kind == "id" and tok.text == "expect":
        p.advance()
        present = True
        if p.tok.kind == "id" and p.tok.text == "not":
            p.advance()
            present = False
        p.sym("@")
        time = p.nat()
        positive = True
        if p.tok.kind == "sym" and p.tok.text == "~":
            p.advance()
            positive = False
        kw = p.tok
        if kw.kind != "id" or kw.text not in _BELIEF_MODALS:
            p.fail("'Obl', 'Imp' or 'Opt'")
        p.advance()
        behavior, context = p.behavior_and_context()
        p.end()
        out.expectations.append(
            Expectation(present, positive, _BELIEF_MODALS[kw.text], behavior, context, time, line))
    else:
        p.fail("a statement ('action', 'entails', 'context', '@', 'query' or 'expect')")
    out.refs.extend(p.refs)


def _resolve(parsed: _Parsed) -> list[ParseError]:
    errors = []
    actions: set[str] = set()
    for name, line, col in parsed.actions:
        if name in actions:
            errors.append(ParseError(line, col, "a new action name", f"'{name}'"))
        actions.add(name)
    contexts: set[str] = set()
    for name, line, col in parsed.contexts:
        if name in contexts:
            errors.append(ParseError(line, col, "a new context name", f"'{name}'"))
        elif len(contexts) == MAX_ATOMS:
            errors.append(ParseError(line, col, f"at most {MAX_ATOMS} context atoms", f"'{name}'"))
        contexts.add(name)
    for kind, name, line, col in parsed.refs:
        known = actions if kind == "action" else contexts
        if name not in known:
            errors.append(ParseError(line, col, f"a declared {kind} name", f"'{name}'"))
    ont = Ontology.build(sorted(actions))
    for specific, general, line, col in parsed.entailments:
        if specific not in actions or general not in actions:
            continue
        if specific == general or ont.entails(general, specific):
            errors.append(ParseError(line, col, "an acyclic entailment",
                                     f"'{specific} -> {general}'"))
        elif (specific, general) not in ont.edges:
            ont = ont.add_entailment(specific, general)
    return errors


def parse_script(text: str) -> Script:
    """Parse a whole script; raises :class:`ParseError` at the first bad token."""
    parsed = _Parsed()
    for number, raw in enumerate(text.split("\n"), start=1):
        _parse_line(raw.rstrip("\r"), number, parsed)
    errors = _resolve(parsed)
    if errors:
        raise min(errors, key=lambda e: (e.line, e.column))
    return Script(
        actions=tuple(n for n, _, _ in parsed.actions),
        entailments=tuple(dict.fromkeys((s, g) for s, g, _, _ in parsed.entailments)),
        contexts=tuple(n for n, _, _ in parsed.contexts),
        testimony=tuple(parsed.testimony),
        queries=tuple(parsed.queries),
        expectations=tuple(parsed.expectations),
    )


def parse_context(text: str, declared=None) -> Formula:
    """Parse a standalone context formula such as ``Monday & !Morning``."""
    p = _LineParser(text, 1)
    f = p.ctx()
    p.end()
    if declared is not None:
        for _, name, line, col in p.refs:
            if name not in declared:
                raise ParseError(line, col, "a declared context name", f"'{name}'")
    return f


def parse_status(text: str) -> tuple[str, Formula]:
    """Parse the body of an interactive ``status ID, ctx`` command."""
    p = _LineParser(text, 1)
    behavior = p.action_ref()
    p.sym(",")
    f = p.ctx()
    p.end()
    return behavior, f


def format_script(script: Script) -> str:
    """Canonical text: declarations, then testimony, queries and expectations."""
    groups = [
        [f"action {a}" for a in script.actions],
        [f"entails {s} -> {g}" for s, g in script.entailments],
        [f"context {c}" for c in script.contexts],
        [str(t) for t in script.testimony],
        [str(q) for q in script.queries],
        [str(e) for e in script.expectations],
    ]
    blocks = ["\n".join(g) for g in groups if g]
    return "\n\n".join(blocks) + "\n" if blocks else ""


def context_atoms_used(script: Script) -> frozenset[str]:
    used: frozenset[str] = frozenset()
    for item in (*script.testimony, *script.queries, *script.expectations):
        used |= atoms_of(item.context)
    return used
