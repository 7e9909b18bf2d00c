"""Advisor reliability estimators and the Bayesian confidence update.

Three estimator variants accumulate positive (alpha) and negative (beta)
evidence per advisor; each encounter adds one unit of mass in total.

``accuracy``
    uses objective feedback: was the advisor right?
``consensus``
    treats agreement with the judge's own choice as correctness.
``confidence``
    weights agreement by the judge's own probability of being correct, so a
    guess teaches nothing and a confident (dis)agreement teaches a lot.

Reliability is ``theta = alpha / (alpha + beta)`` and feeds a Bayes update
of the judge's pre-advice probability of being correct.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.stats import norm

from .core import AdviceEvent, ConfidenceReport, TrustlabError, check_probability


class MissingInputError(TrustlabError, ValueError):
    """An estimator variant was updated without the input it depends on."""


class Variant(str, enum.Enum):
    ACCURACY = "acc"
    CONSENSUS = "cons"
    CONFIDENCE = "conf"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        text = text.strip().lower()
        aliases = {"accuracy": "acc", "consensus": "cons", "confidence": "conf"}
        return cls(aliases.get(text, text))


# weight of the four event classes, keyed by (positive?, advisor confident?)
# positive is "advisor correct" under feedback and "advisor agrees" otherwise
WEIGHTS: Dict[tuple, float] = {
    (False, True): -1.0,
    (False, False): -0.5,
    (True, False): 0.5,
    (True, True): 1.0,
}


def event_weight(positive: bool, advisor_confident: Optional[bool]) -> float:
    """Weight of an advice event; binary events (no advisor confidence) are +-1."""
    if advisor_confident is None:
        return 1.0 if positive else -1.0
    return WEIGHTS[(bool(positive), bool(advisor_confident))]


def evidence_increment(
    variant: Variant,
    event: AdviceEvent,
    p_corr: Optional[float] = None,
    feedback: Optional[bool] = None,
) -> float:
    """Positive-evidence increment for one encounter; the negative one is ``1 - result``.

    ``feedback`` is whether the judge's own pre-advice choice was correct;
    combined with agreement it reveals whether the advisor was correct.
    """
    variant = Variant(variant)
    if variant is Variant.ACCURACY:
        if feedback is None:
            raise MissingInputError("the accuracy variant needs trial feedback")
        advisor_correct = event.agrees == bool(feedback)
        return 0.5 + 0.5 * event_weight(advisor_correct, event.advisor_confident)
    w = event_weight(event.agrees, event.advisor_confident)
    if variant is Variant.CONSENSUS:
        return 0.5 + 0.5 * w
    if p_corr is None:
        raise MissingInputError("the confidence variant needs the judge's p(correct)")
    return 0.5 + (check_probability(p_corr, "p_corr") - 0.5) * w


@dataclass
class Accumulator:
    alpha: float = 0.0
    beta: float = 0.0
    encounters: int = 0

    @property
    def theta(self) -> float:
        total = self.alpha + self.beta
        if self.encounters == 0 or total <= 0:
            return 0.5
        return self.alpha / total


@dataclass
class EstimatorState:
    """Per-advisor evidence accumulators for one estimator variant."""

    variant: Variant
    advisors: Dict[Hashable, Accumulator] = field(default_factory=dict)

    def __post_init__(self):
        self.variant = Variant(self.variant)

    def update(
        self,
        advisor: Hashable,
        event: AdviceEvent,
        p_corr: Optional[float] = None,
        feedback: Optional[bool] = None,
    ) -> "EstimatorState":
        d_alpha = evidence_increment(self.variant, event, p_corr, feedback)
        acc = self.advisors.setdefault(advisor, Accumulator())
        acc.alpha += d_alpha
        acc.beta += 1.0 - d_alpha
        acc.encounters += 1
        return self

    def theta(self, advisor: Hashable) -> float:
        acc = self.advisors.get(advisor)
        return 0.5 if acc is None else acc.theta

    def snapshot(self) -> list:
        """Flat records (advisor, variant, alpha, beta, theta, encounters)."""
        return [
            {
                "advisor": adv,
                "variant": self.variant.value,
                "alpha": acc.alpha,
                "beta": acc.beta,
                "theta": acc.theta,
                "encounters": acc.encounters,
            }
            for adv, acc in self.advisors.items()
        ]


def update(state: EstimatorState, advisor, event, p_corr=None, feedback=None) -> EstimatorState:
    return state.update(advisor, event, p_corr, feedback)


def theta(state: EstimatorState, advisor) -> float:
    return state.theta(advisor)


def preprocess_confidence(raw_steps: Iterable[int], scale_steps: int) -> Dict[int, float]:
    """Map each scale step to ``N * Phi((step - mean) / sd)`` of the rating sample.

    The normal is fitted to ``raw_steps`` (sample mean and SD); the mapping
    covers every step 1..N, not just the observed ones.  A sample without
    variance yields the identity mapping with a warning.
    """
    sample = np.asarray(list(raw_steps), dtype=float)
    steps = range(1, scale_steps + 1)
    if sample.size < 2 or np.ptp(sample) == 0:
        warnings.warn("confidence sample has no variance; using identity mapping", RuntimeWarning, stacklevel=2)
        return {s: float(s) for s in steps}
    mean, sd = sample.mean(), sample.std(ddof=1)
    return {s: float(scale_steps * norm.cdf((s - mean) / sd)) for s in steps}


# top of any scale maps to 0.5 + 0.49 = 0.99
CONF_RANGE = 0.49


def conf_to_prob(c_hat: float, scale_steps: int) -> float:
    if not (0.0 <= c_hat <= scale_steps):
        raise ValueError(f"c_hat must lie in [0, {scale_steps}], got {c_hat}")
    return 0.5 + CONF_RANGE * (c_hat / scale_steps)


THETA_EPS = 1e-9


def bayes_posterior(p_corr: float, theta: float, agrees: bool, warn: bool = True) -> float:
    """Posterior probability that the judge is correct after (dis)agreement.

    The advisor agrees with a correct judge at rate ``theta`` and with a
    wrong judge at rate ``1 - theta``.
    """
    p = check_probability(p_corr, "p_corr")
    t = check_probability(theta, "theta")
    if t < THETA_EPS or t > 1.0 - THETA_EPS:
        if warn:
            warnings.warn(f"theta={t} is degenerate; clamping", RuntimeWarning, stacklevel=2)
        t = min(1.0 - THETA_EPS, max(THETA_EPS, t))
    like_corr = t if agrees else 1.0 - t
    like_err = 1.0 - like_corr
    num = p * like_corr
    return num / (num + (1.0 - p) * like_err)


def predict_post_confidence(
    report: ConfidenceReport, posterior: float, mapping: Mapping[int, float]
) -> ConfidenceReport:
    """Turn a posterior p(correct) back into a report on the original scale.

    The posterior is mapped to the transformed confidence scale and the scale
    step whose transformed value is nearest is chosen.  A posterior below .5
    is a change of mind; exactly .5 keeps the original side.
    """
    n = report.scale_steps
    side = report.side
    if posterior < 0.5:
        side, posterior = -side, 1.0 - posterior
    target = (posterior - 0.5) / CONF_RANGE * n
    step = min(mapping, key=lambda s: (abs(mapping[s] - target), s))
    return ConfidenceReport(side, int(step), n)
