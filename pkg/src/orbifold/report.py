from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple
    message: str = ""

    def __str__(self) -> str:
        text = f"{self.law}: {self.witness!r}"
        return f"{text} ({self.message})" if self.message else text


@dataclass
class ValidationReport:
    """Violated laws with witnesses; an empty report means valid."""

    violations: list[Violation] = field(default_factory=list)
    limit: int | None = None

    def add(self, law: str, *witness: Any, message: str = "") -> None:
        if self.limit is None or len(self.violations) < self.limit:
            self.violations.append(Violation(law, tuple(witness), message))

    def extend(self, other: "ValidationReport") -> None:
        for v in other.violations:
            self.add(v.law, *v.witness, message=v.message)

    @property
    def ok(self) -> bool:
        return not self.violations

    def laws(self) -> set[str]:
        return {v.law for v in self.violations}

    def __bool__(self) -> bool:
        # truthy when there is something to report
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)


@dataclass(frozen=True)
class Verdict:
    """A boolean answer plus the data that justifies it."""

    value: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.value
