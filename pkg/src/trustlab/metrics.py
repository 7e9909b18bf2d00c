"""Outcome measures over simulated judge-advisor sessions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence

import numpy as np

from .core import AdviceEvent, ConfidenceReport, DegenerateSampleError, Side, TrustlabError


class InsufficientTrialsError(TrustlabError, ValueError):
    pass


@dataclass
class TrialRecord:
    trial: int
    advisor: Hashable
    truth: Side
    pre: ConfidenceReport
    advice: AdviceEvent
    post: ConfidenceReport
    feedback: bool
    block: int = 0
    d: int = 0
    pre_posterior: float = 0.5
    theta: Dict[str, float] = field(default_factory=dict)
    model_post: Dict[str, ConfidenceReport] = field(default_factory=dict)
    # variant -> (alpha, beta, encounters) after this trial's update
    evidence: Dict[str, tuple] = field(default_factory=dict)

    @property
    def pre_correct(self) -> bool:
        return self.pre.side is self.truth


@dataclass
class SessionLog:
    session: int
    experiment: int
    roster: List[Hashable]
    records: List[TrialRecord] = field(default_factory=list)
    feedback: bool = False

    def append(self, record: TrialRecord) -> None:
        if record.advisor not in self.roster:
            raise ValueError(f"advisor {record.advisor!r} is not in the roster")
        if self.records and record.trial <= self.records[-1].trial:
            raise ValueError("trial indices must be strictly increasing")
        self.records.append(record)

    def for_advisor(self, advisor) -> List[TrialRecord]:
        return [r for r in self.records if r.advisor == advisor]

    def final_theta(self, variant: str, advisor) -> float:
        for r in reversed(self.records):
            if r.advisor == advisor and variant in r.theta:
                return r.theta[variant]
        return 0.5


def confidence_change(pre: ConfidenceReport, post: ConfidenceReport) -> int:
    """Signed change of confidence relative to the pre-advice choice.

    A change of mind counts the post-advice step as negative, so the range
    for an N-step half-scale is [-2N, N - 1].
    """
    if pre.scale_steps != post.scale_steps:
        raise ValueError("pre and post reports use different scales")
    post_signed = post.step if post.side is pre.side else -post.step
    return post_signed - pre.step


def influence_from_changes(changes: Sequence[float], agrees: Sequence[bool]) -> float:
    changes = np.asarray(changes, dtype=float)
    agrees = np.asarray(agrees, dtype=bool)
    if not agrees.any() or agrees.all():
        raise InsufficientTrialsError("influence needs at least one agreement and one disagreement")
    return float(changes[agrees].mean() - changes[~agrees].mean())


def influence(log: SessionLog, advisor) -> float:
    """Mean confidence change on agreement minus mean change on disagreement."""
    recs = log.for_advisor(advisor)
    return influence_from_changes(
        [confidence_change(r.pre, r.post) for r in recs], [r.advice.agrees for r in recs]
    )


def correlate_models(reference_post: Sequence[float], candidate_post: Sequence[float]) -> float:
    """Pearson correlation of trial-aligned post-advice confidence series."""
    x = np.asarray(reference_post, dtype=float)
    y = np.asarray(candidate_post, dtype=float)
    if x.shape != y.shape:
        raise ValueError("series differ in length")
    if x.size < 10:
        raise InsufficientTrialsError("need at least 10 trials to correlate")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateSampleError("a series has zero variance")
    return float(np.corrcoef(x, y)[0, 1])


def shuffle_control(series: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """Uniform random permutation of the trials."""
    return rng.permutation(np.asarray(series))


def permutation_pvalue(
    reference: Sequence[float], candidate: Sequence[float], rng: np.random.Generator, n_shuffles: int = 1000
) -> float:
    """Two-sided permutation p-value of the Pearson correlation."""
    observed = abs(correlate_models(reference, candidate))
    cand = np.asarray(candidate, dtype=float)
    hits = sum(abs(correlate_models(reference, shuffle_control(cand, rng))) >= observed for _ in range(n_shuffles))
    return (hits + 1) / (n_shuffles + 1)


def signed_post(report: ConfidenceReport, reference_side: Side) -> int:
    """Post-advice confidence signed relative to a reference side."""
    return report.step if report.side is reference_side else -report.step


def model_correlation(log: SessionLog, variant: str) -> float:
    """Within-session correlation of the judge's and a model's post-advice confidence."""
    recs = [r for r in log.records if variant in r.model_post]
    ref = [signed_post(r.post, r.pre.side) for r in recs]
    cand = [signed_post(r.model_post[variant], r.pre.side) for r in recs]
    return correlate_models(ref, cand)
