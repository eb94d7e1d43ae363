"""Check records and reports.

A verdict is never stored independently: it is ``residual <= threshold``, so
anyone holding a report can recompute it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual,
                "threshold": self.threshold, "verdict": self.verdict}


def count_check(name: str, failures: int) -> Check:
    """A check that passes when no instance failed."""
    return Check(name, failures, 0)


@dataclass
class Report:
    """Outcome of one command: checks, scalar values and constructed objects.

    ``objects`` holds operators and submodules keyed by name; the emitter
    serialises them in the problem-file format.
    """

    command: list[str]
    seed: int
    checks: list[Check] = field(default_factory=list)
    values: dict[str, Any] = field(default_factory=dict)
    objects: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, residual: float, threshold: float) -> Check:
        c = Check(name, residual, threshold)
        self.checks.append(c)
        return c

    def extend(self, checks):
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)
