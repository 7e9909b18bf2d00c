"""Shared domain types, probability helpers and seeded random streams."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class TrustlabError(Exception):
    """Base class for all errors raised by trustlab."""


class ChanceJudgeError(TrustlabError, ValueError):
    """Raised when an operation is undefined for a judge at chance accuracy."""


class DegenerateSampleError(TrustlabError, ValueError):
    """Raised when a sample lacks the variation an operation needs."""


def check_probability(value: float, name: str = "value") -> float:
    """Return ``value`` as a float, rejecting anything outside [0, 1]."""
    value = float(value)
    if not (0.0 <= value <= 1.0):  # also rejects NaN
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True, order=True)
class Probability:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", check_probability(self.value))

    def __float__(self) -> float:
        return self.value

    def complement(self) -> "Probability":
        return Probability(1.0 - self.value)


class Side(enum.Enum):
    """One of the two response options (left/right box, outcome A/B)."""

    A = 1
    B = -1

    def __neg__(self) -> "Side":
        return Side.B if self is Side.A else Side.A

    @property
    def sign(self) -> int:
        return self.value

    @classmethod
    def from_sign(cls, x: float) -> "Side":
        """Map a signed quantity to a side; zero maps to A."""
        return cls.A if x >= 0 else cls.B

    @classmethod
    def parse(cls, text: str) -> "Side":
        return cls[text.strip().upper()]


@dataclass(frozen=True)
class ConfidenceReport:
    """A committed choice plus a confidence step on one half of the scale.

    ``step`` runs from 1 (least confident) to ``scale_steps``; the midpoint
    of the full scale is not representable.
    """

    side: Side
    step: int
    scale_steps: int = 5

    def __post_init__(self):
        if self.scale_steps < 1:
            raise ValueError(f"scale_steps must be positive, got {self.scale_steps}")
        if not (1 <= self.step <= self.scale_steps):
            raise ValueError(
                f"step must lie in [1, {self.scale_steps}], got {self.step}"
            )

    @property
    def signed(self) -> int:
        return self.side.sign * self.step


@dataclass(frozen=True)
class AdviceEvent:
    advisor_side: Side
    agrees: bool
    advisor_correct: bool
    advisor_confident: Optional[bool] = None

    @classmethod
    def from_sides(
        cls,
        advisor_side: Side,
        judge_side: Side,
        truth: Side,
        advisor_confident: Optional[bool] = None,
    ) -> "AdviceEvent":
        return cls(
            advisor_side=advisor_side,
            agrees=advisor_side is judge_side,
            advisor_correct=advisor_side is truth,
            advisor_confident=advisor_confident,
        )


MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by a seed and a stream path.

    The stream path is an arbitrary tuple of non-negative integers, e.g.
    ``(session, module, advisor)``.  Streams with different paths are
    statistically independent; the same (seed, path) always yields the same
    draws because numpy's ``SeedSequence`` and ``Philox`` are platform
    independent.
    """

    seed: int
    stream_id: tuple = ()

    def __post_init__(self):
        if not (0 <= self.seed <= MASK64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        sid = self.stream_id
        if isinstance(sid, int):
            sid = (sid,)
        sid = tuple(int(s) & MASK64 for s in sid)
        object.__setattr__(self, "stream_id", sid)

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + tuple(key))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(ss))


# module ids used as the second element of stream keys
STREAM_JUDGE = 1
STREAM_TASK = 2
STREAM_ADVISOR = 3
STREAM_ABM = 4
STREAM_METRICS = 5


def agreement_rate_identity(judge_acc: float, advisor_acc: float) -> float:
    """Agreement rate of two independent binary judges with the given accuracies."""
    a = check_probability(judge_acc, "judge_acc")
    b = check_probability(advisor_acc, "advisor_acc")
    return a * b + (1.0 - a) * (1.0 - b)


def invert_agreement(judge_acc: float, observed_agreement: float) -> float:
    """Advisor accuracy implied by an observed agreement rate.

    Inverts :func:`agreement_rate_identity` for the advisor's accuracy and
    clamps the result to [0, 1].
    """
    a = check_probability(judge_acc, "judge_acc")
    g = check_probability(observed_agreement, "observed_agreement")
    slope = 2.0 * a - 1.0
    if slope == 0.0:
        raise ChanceJudgeError("agreement carries no information for a chance-level judge")
    b = (g - (1.0 - a)) / slope
    return min(1.0, max(0.0, b))


def logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def combine_odds(p: float, e: float) -> float:
    """Bayesian combination of a prior ``p`` with evidence ``e`` for the same event.

    Returns ``p`` unchanged when both hypotheses have zero mass.
    """
    num = p * e
    den = num + (1.0 - p) * (1.0 - e)
    if den <= 0.0:
        return p
    return num / den
