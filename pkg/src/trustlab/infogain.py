"""Objective value of advice.

Information gain here is a difference of probabilities: how much an advice
event moves the probability that the judge's choice is correct.  It is not
an entropy measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np
from scipy.stats import norm, rankdata

from .advisors import Exp1Deck, Exp2Policy, Exp3Policy
from .core import DegenerateSampleError, TrustlabError, check_probability


class ZeroProbabilityEventError(TrustlabError, ValueError):
    pass


EXP1_EVENT_NAMES = ("confident_disagree", "unconfident_disagree", "unconfident_agree", "confident_agree")
EXP2_EVENT_NAMES = ("agree", "disagree")


@dataclass(frozen=True)
class AdvicePosteriorTable:
    """Event likelihoods given the judge's correctness, plus the prior p(correct)."""

    events: Tuple[str, ...]
    p_given_correct: Tuple[float, ...]
    p_given_error: Tuple[float, ...]
    prior: float = 0.7

    def __post_init__(self):
        if not (len(self.events) == len(self.p_given_correct) == len(self.p_given_error)):
            raise ValueError("events and likelihood vectors differ in length")
        check_probability(self.prior, "prior")
        for name, vec in (("p_given_correct", self.p_given_correct), ("p_given_error", self.p_given_error)):
            for p in vec:
                check_probability(p, name)
            if abs(sum(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1, sums to {sum(vec)}")

    def index(self, event: str) -> int:
        return self.events.index(event)

    def p_event(self, event: str) -> float:
        i = self.index(event)
        return self.prior * self.p_given_correct[i] + (1.0 - self.prior) * self.p_given_error[i]

    def posterior(self, event: str) -> float:
        pe = self.p_event(event)
        if pe <= 0.0:
            raise ZeroProbabilityEventError(f"event {event!r} has zero probability")
        return self.prior * self.p_given_correct[self.index(event)] / pe

    def possible_events(self) -> Tuple[str, ...]:
        return tuple(e for e in self.events if self.p_event(e) > 0.0)


def table_for_exp1(deck: Exp1Deck, prior: float = 0.7) -> AdvicePosteriorTable:
    """Advice from a deck is independent of the judge: a correct judge sees
    agreement exactly when the advisor is correct, a wrong judge when the
    advisor is wrong."""
    n = deck.size
    ic, iu, cu, cc = (c / n for c in deck.counts)
    return AdvicePosteriorTable(
        EXP1_EVENT_NAMES,
        p_given_correct=(ic, iu, cu, cc),
        p_given_error=(cc, cu, iu, ic),
        prior=prior,
    )


def table_for_exp2(policy: Exp2Policy, prior: float = 0.7) -> AdvicePosteriorTable:
    a, b = policy.p_agree_given_correct, policy.p_agree_given_incorrect
    return AdvicePosteriorTable(EXP2_EVENT_NAMES, (a, 1.0 - a), (b, 1.0 - b), prior)


def info_gain(table: AdvicePosteriorTable, event: str) -> float:
    """Posterior minus prior probability that the judge is correct."""
    return table.posterior(event) - table.prior


def mean_abs_info_gain(table: AdvicePosteriorTable) -> float:
    """Mean of |IG| over the events that can occur."""
    events = table.possible_events()
    return float(np.mean([abs(info_gain(table, e)) for e in events]))


def expected_info_gain(table: AdvicePosteriorTable, aggregate: str = "mean") -> float:
    """|IG(e)| * p(e), averaged (default) or summed over events.

    Table-style averaging runs over all listed events; impossible events
    contribute zero.
    """
    terms = [abs(info_gain(table, e)) * table.p_event(e) if table.p_event(e) > 0 else 0.0 for e in table.events]
    if aggregate == "mean":
        return float(np.mean(terms))
    if aggregate == "sum":
        return float(np.sum(terms))
    raise ValueError(f"aggregate must be 'mean' or 'sum', got {aggregate!r}")


def exp3_gain_curves(
    policy: Exp3Policy,
    conf_mean: float = 25.0,
    conf_sd: float = 10.0,
    scale_steps: int = 50,
    grid_points: int = 1000,
    scaling: str = "none",
):
    """Information gain after agreement/disagreement over pre-advice confidence.

    Confidence ``c`` on the 0..N half-scale is read as p(correct) =
    0.5 + c / (2N); gains are expressed in scale points of the full 2N-point
    scale.  The low/mid/high bins are the 30/70% quantiles of the assumed
    Gaussian confidence distribution.  ``scaling="normalised"`` multiplies
    each gain by the probability of its event.

    Returns ``(grid, gain_agree, gain_disagree, weights)``.
    """
    grid = np.linspace(0.0, scale_steps, grid_points)
    lo, hi = norm.ppf([0.30, 0.70], conf_mean, conf_sd)
    a_low, a_mid, a_high = policy.p_agree_given_correct_by_bin
    # same tie rule as ConfidenceBinner
    agree_corr = np.where(grid < lo, a_low, np.where(grid > hi, a_high, a_mid))
    agree_err = policy.p_agree_given_incorrect
    prior = 0.5 + grid / (2.0 * scale_steps)
    p_agree = prior * agree_corr + (1.0 - prior) * agree_err
    p_disagree = 1.0 - p_agree
    post_agree = prior * agree_corr / p_agree
    post_disagree = prior * (1.0 - agree_corr) / p_disagree
    points = 2.0 * scale_steps
    gain_agree = np.abs(post_agree - prior) * points
    gain_disagree = np.abs(post_disagree - prior) * points
    if scaling == "normalised":
        gain_agree = gain_agree * p_agree
        gain_disagree = gain_disagree * p_disagree
    elif scaling != "none":
        raise ValueError(f"scaling must be 'none' or 'normalised', got {scaling!r}")
    weights = norm.pdf(grid, conf_mean, conf_sd)
    weights = weights / weights.sum()
    return grid, gain_agree, gain_disagree, weights


def auc_expected_info_gain_exp3(policy: Exp3Policy, **kwargs) -> float:
    """Average over agree/disagree of the confidence-weighted area under the gain curve."""
    _, ga, gd, w = exp3_gain_curves(policy, **kwargs)
    return float(0.5 * (np.sum(ga * w) + np.sum(gd * w)))


def type2_auroc(confidence: Sequence[float], correct: Sequence[bool]) -> float:
    """P(conf on a correct trial > conf on an error) + 0.5 P(tie)."""
    conf = np.asarray(confidence, dtype=float)
    corr = np.asarray(correct, dtype=bool)
    if conf.shape != corr.shape:
        raise ValueError("confidence and correct differ in length")
    n_c, n_e = int(corr.sum()), int((~corr).sum())
    if n_c == 0 or n_e == 0:
        raise DegenerateSampleError("type-2 AUROC needs both correct and incorrect trials")
    ranks = rankdata(conf)
    u = ranks[corr].sum() - n_c * (n_c + 1) / 2.0
    return float(u / (n_c * n_e))


def deck_type2_auroc(deck: Exp1Deck) -> float:
    cards = deck.cards()
    return type2_auroc([float(conf) for _, conf in cards], [corr for corr, _ in cards])


def exp1_analytics(deck: Exp1Deck, prior: float = 0.7) -> Dict[str, float]:
    table = table_for_exp1(deck, prior)
    row = {f"ig_{e}": info_gain(table, e) if table.p_event(e) > 0 else float("nan") for e in table.events}
    row["mean_abs_ig"] = mean_abs_info_gain(table)
    row["ig_e"] = expected_info_gain(table)
    row["type2_auroc"] = deck_type2_auroc(deck)
    return row


def exp2_analytics(policy: Exp2Policy, prior: float = 0.7) -> Dict[str, float]:
    table = table_for_exp2(policy, prior)
    row = {f"ig_{e}": info_gain(table, e) for e in table.events}
    row["mean_abs_ig"] = mean_abs_info_gain(table)
    row["ig_e"] = expected_info_gain(table)
    return row
