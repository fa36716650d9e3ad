"""Exception types shared across the package."""
from __future__ import annotations


class DdicError(Exception):
    """Base class for all errors raised by this package."""


class DeclarationError(DdicError):
    """A name was undeclared, declared twice, or otherwise ill-formed."""


class CycleError(DeclarationError):
    """Adding an entailment edge would close a cycle in the ontology."""

    def __init__(self, path: list[str]):
        self.path = list(path)
        super().__init__("entailment cycle: " + " -> ".join(self.path))


class ContractViolation(DdicError, ValueError):
    """An operation was called with arguments outside its precondition."""


class OracleRefusal(DdicError):
    """The reference oracle refuses inputs beyond its desk-scale bounds."""


class ParseError(DdicError):
    """Syntax or resolution error in a ``.ddic`` script.

    ``line`` and ``column`` are 1-based and point at the first offending token.
    """

    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found}")
