"""Outcome of a single run of a tester."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Decision(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TestVerdict:
    """Decision plus the statistic and threshold that produced it.

    ``stage`` is ``"prelim"`` when the light-mass pre-test fired and
    ``"main"`` otherwise. ``m`` is the nominal main-stage sample size and
    ``samples_used`` the number of samples actually consumed.
    """

    __test__ = False  # not a pytest class

    decision: Decision
    statistic: float
    threshold: float
    stage: str = "main"
    m: int = 0
    samples_used: int = 0
    capped: bool = False

    @property
    def accepted(self) -> bool:
        return self.decision is Decision.ACCEPT
