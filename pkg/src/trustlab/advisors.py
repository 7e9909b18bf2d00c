"""Virtual advisor policies for the three judge-advisor experiments.

* Experiment 1 advisors play a shuffled deck of (correct?, confident?) cards
  each block, independent of the judge.
* Experiment 2 advisors agree with the judge with a probability conditional
  on whether the judge was correct.
* Experiment 3 advisors additionally condition agreement on which tertile
  (30/40/30) of the judge's recent confidence distribution the current
  pre-advice rating falls into.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .core import AdviceEvent, ConfidenceReport, DegenerateSampleError, Side, TrustlabError, check_probability


class DeckExhaustedError(TrustlabError, RuntimeError):
    pass


EXP1_EVENTS = ("incorrect_confident", "incorrect_unconfident", "correct_unconfident", "correct_confident")


@dataclass(frozen=True)
class Exp1Deck:
    """Counts of each advice card over one block of ten encounters."""

    incorrect_confident: int
    incorrect_unconfident: int
    correct_unconfident: int
    correct_confident: int

    def __post_init__(self):
        counts = self.counts
        if any(c < 0 for c in counts):
            raise ValueError("deck counts must be non-negative")
        if sum(counts) != 10:
            raise ValueError(f"deck counts must sum to 10, got {sum(counts)}")

    @property
    def counts(self) -> Tuple[int, int, int, int]:
        return (
            self.incorrect_confident,
            self.incorrect_unconfident,
            self.correct_unconfident,
            self.correct_confident,
        )

    @property
    def size(self) -> int:
        return sum(self.counts)

    @property
    def accuracy(self) -> float:
        return (self.correct_unconfident + self.correct_confident) / self.size

    @property
    def confident_rate(self) -> float:
        return (self.incorrect_confident + self.correct_confident) / self.size

    def cards(self) -> List[Tuple[bool, bool]]:
        """Unshuffled list of (correct, confident) cards."""
        out = []
        for (correct, confident), n in zip(
            ((False, True), (False, False), (True, False), (True, True)), self.counts
        ):
            out += [(correct, confident)] * n
        return out

    def probabilities(self) -> Dict[Tuple[bool, bool], float]:
        return {card: n / self.size for card, n in zip(
            ((False, True), (False, False), (True, False), (True, True)), self.counts)}


class ShuffledDeck:
    """One block's worth of cards drawn without replacement."""

    def __init__(self, deck: Exp1Deck, rng: np.random.Generator):
        self.deck = deck
        cards = deck.cards()
        order = rng.permutation(len(cards))
        self._cards = [cards[i] for i in order]
        self._pos = 0

    @property
    def remaining(self) -> int:
        return len(self._cards) - self._pos

    def draw(self) -> Tuple[bool, bool]:
        if self._pos >= len(self._cards):
            raise DeckExhaustedError("all cards of this block have been played")
        card = self._cards[self._pos]
        self._pos += 1
        return card


def exp1_advise(deck: ShuffledDeck, truth: Side, judge_side: Side, rng=None) -> AdviceEvent:
    """Play the next card; the advisor's side depends only on the truth."""
    correct, confident = deck.draw()
    side = truth if correct else -truth
    return AdviceEvent.from_sides(side, judge_side, truth, advisor_confident=confident)


@dataclass(frozen=True)
class Exp2Policy:
    p_agree_given_correct: float
    p_agree_given_incorrect: float

    def __post_init__(self):
        check_probability(self.p_agree_given_correct, "p_agree_given_correct")
        check_probability(self.p_agree_given_incorrect, "p_agree_given_incorrect")

    def expected_rates(self, judge_acc: float) -> Tuple[float, float]:
        """(advisor accuracy, agreement rate) against a judge of given accuracy."""
        a, c, i = judge_acc, self.p_agree_given_correct, self.p_agree_given_incorrect
        return a * c + (1 - a) * (1 - i), a * c + (1 - a) * i


def _agreeing_event(agree: bool, judge_side: Side, judge_correct: bool) -> AdviceEvent:
    side = judge_side if agree else -judge_side
    truth = judge_side if judge_correct else -judge_side
    return AdviceEvent.from_sides(side, judge_side, truth)


def exp2_advise(
    policy: Exp2Policy, judge_correct: bool, judge_side: Side, rng: np.random.Generator
) -> AdviceEvent:
    p = policy.p_agree_given_correct if judge_correct else policy.p_agree_given_incorrect
    return _agreeing_event(bool(rng.random() < p), judge_side, judge_correct)


@dataclass(frozen=True)
class Exp3Policy:
    p_agree_given_correct_by_bin: Tuple[float, float, float]
    p_agree_given_incorrect: float = 0.30

    def __post_init__(self):
        if len(self.p_agree_given_correct_by_bin) != 3:
            raise ValueError("need one agreement probability per confidence bin")
        object.__setattr__(
            self, "p_agree_given_correct_by_bin", tuple(float(p) for p in self.p_agree_given_correct_by_bin)
        )
        for p in self.p_agree_given_correct_by_bin:
            check_probability(p, "p_agree_given_correct_by_bin")
        check_probability(self.p_agree_given_incorrect, "p_agree_given_incorrect")

    def p_agree(self, judge_correct: bool, bin_index: int) -> float:
        if not judge_correct:
            return self.p_agree_given_incorrect
        return self.p_agree_given_correct_by_bin[bin_index]


LOW, MID, HIGH = 0, 1, 2


@dataclass
class ConfidenceBinner:
    """Assigns confidence values to low/mid/high bins at sample quantiles.

    A value strictly below the lower cut is low, strictly above the upper cut
    is high, anything else (including ties with either cut) is mid.
    """

    reference_sample: Sequence[float]
    quantiles: Tuple[float, float] = (0.30, 0.70)
    cuts: Optional[Tuple[float, float]] = None
    degenerate: bool = False

    def __post_init__(self):
        self.reference_sample = list(self.reference_sample)
        if self.cuts is None:
            if not self.reference_sample:
                raise ValueError("reference sample must be non-empty")
            lo, hi = np.quantile(self.reference_sample, self.quantiles, method="inverted_cdf")
            self.cuts = (float(lo), float(hi))

    def bin(self, confidence: float) -> int:
        lo, hi = self.cuts
        if confidence < lo:
            return LOW
        if confidence > hi:
            return HIGH
        return MID

    def proportions(self, values: Optional[Sequence[float]] = None) -> Tuple[float, float, float]:
        values = self.reference_sample if values is None else values
        counts = np.bincount([self.bin(v) for v in values], minlength=3)
        return tuple(float(c) for c in counts / counts.sum())


def rebin(binner: ConfidenceBinner, recent_confidences: Sequence[float], strict: bool = False) -> ConfidenceBinner:
    """New binner with cuts at the 30th/70th percentiles of ``recent_confidences``.

    A sample whose values are all identical would collapse the cuts; the
    previous cuts are kept and the returned binner is flagged ``degenerate``
    (or :class:`DegenerateSampleError` is raised when ``strict``).
    """
    sample = list(recent_confidences)
    if len(sample) < 10:
        raise ValueError(f"need at least 10 confidences to rebin, got {len(sample)}")
    if min(sample) == max(sample):
        if strict:
            raise DegenerateSampleError("all confidences identical; cuts would collapse")
        warnings.warn("degenerate confidence sample, keeping previous bin cuts", RuntimeWarning, stacklevel=2)
        return ConfidenceBinner(sample, binner.quantiles, cuts=binner.cuts, degenerate=True)
    return ConfidenceBinner(sample, binner.quantiles)


def exp3_advise(
    policy: Exp3Policy,
    binner: ConfidenceBinner,
    judge_correct: bool,
    judge_conf: ConfidenceReport,
    judge_side: Side,
    rng: np.random.Generator,
) -> AdviceEvent:
    p = policy.p_agree(judge_correct, binner.bin(judge_conf.step))
    return _agreeing_event(bool(rng.random() < p), judge_side, judge_correct)


EXP1_PROFILES: Dict[str, Exp1Deck] = {
    "acc_cal": Exp1Deck(0, 2, 3, 5),
    "acc_uncal": Exp1Deck(1, 1, 4, 4),
    "inacc_cal": Exp1Deck(0, 4, 1, 5),
    "inacc_uncal": Exp1Deck(2, 2, 3, 3),
}

EXP2_PROFILES: Dict[str, Exp2Policy] = {
    "hiacc_hiagr": Exp2Policy(6.5 / 7, 1.5 / 3),
    "hiacc_loagr": Exp2Policy(5.5 / 7, 0.5 / 3),
    "loacc_hiagr": Exp2Policy(5.5 / 7, 2.5 / 3),
    "loacc_loagr": Exp2Policy(4.5 / 7, 1.5 / 3),
}

EXP3_PROFILES: Dict[str, Exp3Policy] = {
    "bias_sharing": Exp3Policy((0.60, 0.70, 0.80)),
    "unbiased": Exp3Policy((0.70, 0.70, 0.70)),
    "anti_bias": Exp3Policy((0.80, 0.70, 0.60)),
}

# published Type-2 AUROC values for the Exp1 decks, reported alongside ours
EXP1_PUBLISHED_AUROC = {"acc_cal": 0.72, "acc_uncal": 0.5, "inacc_cal": 0.84, "inacc_uncal": 0.5}

Policy = Union[Exp1Deck, Exp2Policy, Exp3Policy]


def make_policy(entry: Union[str, Mapping]) -> Policy:
    """Build a policy from a profile name or an explicit table.

    Explicit tables are mappings with either the four Exp1 count keys, the
    two Exp2 probability keys, or ``p_agree_given_correct_by_bin`` (plus an
    optional ``p_agree_given_incorrect``) for Exp3.
    """
    if isinstance(entry, str):
        for table in (EXP1_PROFILES, EXP2_PROFILES, EXP3_PROFILES):
            if entry in table:
                return table[entry]
        raise KeyError(f"unknown advisor profile {entry!r}")
    entry = dict(entry)
    if set(EXP1_EVENTS) <= set(entry):
        return Exp1Deck(**{k: int(entry[k]) for k in EXP1_EVENTS})
    if "p_agree_given_correct_by_bin" in entry:
        return Exp3Policy(
            tuple(entry["p_agree_given_correct_by_bin"]),
            float(entry.get("p_agree_given_incorrect", 0.30)),
        )
    if {"p_agree_given_correct", "p_agree_given_incorrect"} <= set(entry):
        return Exp2Policy(float(entry["p_agree_given_correct"]), float(entry["p_agree_given_incorrect"]))
    raise ValueError(f"cannot interpret advisor table with keys {sorted(entry)}")


def experiment_of(policy: Policy) -> int:
    if isinstance(policy, Exp1Deck):
        return 1
    if isinstance(policy, Exp2Policy):
        return 2
    return 3
