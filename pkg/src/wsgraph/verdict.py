"""Three-valued verdicts with attached numeric evidence."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Outcome(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    evidence: dict[str, Any] = field(default_factory=dict)

    @property
    def positive(self) -> bool:
        return self.outcome is Outcome.POSITIVE

    @property
    def negative(self) -> bool:
        return self.outcome is Outcome.NEGATIVE

    def __str__(self) -> str:
        return self.outcome.value


def positive(**evidence: Any) -> Verdict:
    return Verdict(Outcome.POSITIVE, evidence)


def negative(**evidence: Any) -> Verdict:
    return Verdict(Outcome.NEGATIVE, evidence)


def undetermined(**evidence: Any) -> Verdict:
    return Verdict(Outcome.UNDETERMINED, evidence)
