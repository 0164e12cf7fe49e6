"""Exception types shared across the package.

Every domain error carries a ``witness`` so callers (and the CLI) can print
the offending data instead of a bare message.
"""
from __future__ import annotations

from typing import Any


class OrbifoldError(Exception):
    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class NonComposable(OrbifoldError):
    """A path has a junction where dst(a_i) != src(a_{i+1}) or compose is undefined."""

    def __init__(self, index: int, message: str = ""):
        super().__init__(message or f"arrows at positions {index} and {index + 1} do not compose", index)
        self.index = index


class BudgetExhausted(OrbifoldError):
    pass


class NotFoldable(OrbifoldError):
    pass


class NotSemiRegular(OrbifoldError):
    pass


class NotTranslative(OrbifoldError):
    pass


class NotRightNormal(OrbifoldError):
    pass


class NotSimple(OrbifoldError):
    pass


class NotUniquelyRepresentable(OrbifoldError):
    pass


class GivenSetNotTransversal(OrbifoldError):
    pass


class InfiniteGroup(OrbifoldError):
    pass


class AxiomViolation(OrbifoldError):
    def __init__(self, law: str, witness: Any = None, message: str = ""):
        super().__init__(message or f"axiom {law} violated", witness)
        self.law = law
