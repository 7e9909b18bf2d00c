"""Synthetic observer for the two-box dot comparison task.

The observer draws noisy evidence, maps it through a logistic to a
probability that the left box ("A") has more dots, combines that with its
prior, and reports the chosen side with a confidence step on an N-step
half-scale.  A 2-down-1-up staircase titrates the dot difference ``d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .core import ConfidenceReport, Side, check_probability, combine_odds, logistic


@dataclass(frozen=True)
class JudgeParams:
    noise_sigma: float = 1.0
    prior_pA: float = 0.5
    sigmoid_slope: float = 1.0
    scale_steps: int = 5
    # signal units per dot of difference
    dot_scale: float = 0.055

    def __post_init__(self):
        if not self.noise_sigma > 0:
            raise ValueError("noise_sigma must be > 0")
        if not 0.0 < self.prior_pA < 1.0:
            raise ValueError("prior_pA must lie in (0, 1)")
        if not self.sigmoid_slope > 0:
            raise ValueError("sigmoid_slope must be > 0")
        if self.scale_steps < 1:
            raise ValueError("scale_steps must be >= 1")


@dataclass(frozen=True)
class Stimulus:
    truth: Side
    signal: float

    @classmethod
    def from_dots(cls, truth: Side, d: int, dot_scale: float = 0.055) -> "Stimulus":
        return cls(truth, truth.sign * d * dot_scale)


@dataclass(frozen=True)
class StaircaseState:
    d: int = 20
    consecutive_correct: int = 0
    step_size: int = 1
    d_min: int = 1

    def __post_init__(self):
        if self.step_size < 1 or self.d_min < 1:
            raise ValueError("step_size and d_min must be positive")
        if self.d < self.d_min:
            raise ValueError(f"d={self.d} below d_min={self.d_min}")


def staircase_update(state: StaircaseState, was_correct: bool) -> StaircaseState:
    """Two correct in a row make the task harder, any error makes it easier."""
    if not was_correct:
        return replace(state, d=state.d + state.step_size, consecutive_correct=0)
    if state.consecutive_correct + 1 >= 2:
        return replace(
            state,
            d=max(state.d_min, state.d - state.step_size),
            consecutive_correct=0,
        )
    return replace(state, consecutive_correct=state.consecutive_correct + 1)


def confidence_to_step(confidence: float, scale_steps: int) -> int:
    """Discretize a confidence in [0.5, 1] onto equal-width half-scale bins.

    Values on a bin edge go to the upper bin; 1.0 maps to the top step.
    """
    x = (confidence - 0.5) * 2.0 * scale_steps
    step = int(math.floor(x + 1e-12)) + 1
    return min(scale_steps, max(1, step))


def report_from_posterior(posterior_pA: float, scale_steps: int) -> ConfidenceReport:
    side = Side.A if posterior_pA >= 0.5 else Side.B
    confidence = 0.5 + abs(posterior_pA - 0.5)
    return ConfidenceReport(side, confidence_to_step(confidence, scale_steps), scale_steps)


def perceive_from_noise(
    params: JudgeParams, stim: Stimulus, z: float
) -> Tuple[float, ConfidenceReport]:
    """Deterministic core of :func:`perceive` given a standard normal draw ``z``."""
    evidence = logistic(params.sigmoid_slope * (stim.signal + params.noise_sigma * z))
    posterior = combine_odds(params.prior_pA, evidence)
    return posterior, report_from_posterior(posterior, params.scale_steps)


def perceive(
    params: JudgeParams, stim: Stimulus, rng: np.random.Generator
) -> Tuple[float, ConfidenceReport]:
    """Return the posterior probability of A and the resulting confidence report."""
    return perceive_from_noise(params, stim, float(rng.standard_normal()))


def judge_confidence(posterior_pA: float) -> float:
    return 0.5 + abs(check_probability(posterior_pA) - 0.5)
