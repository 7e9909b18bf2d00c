"""Simulated judge-advisor sessions for the three experiment designs.

A session runs practice trials (judge only, to settle the staircase and seed
the Experiment 3 confidence reference), then blocks in which each advisor is
met a fixed number of times in shuffled order.  Null trials are not
simulated.  The synthetic judge revises its confidence with the Bayes update
using its own running reliability estimate: the accuracy variant when it
gets feedback, the confidence variant otherwise.

After the session, every requested estimator variant is replayed over the
log the way the models were applied to behavioural data: pre-advice ratings
are normalised per session, converted to p(correct), and each variant
records its theta and predicted post-advice report per trial.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import advisors as adv
from .core import (
    STREAM_ADVISOR,
    STREAM_JUDGE,
    STREAM_TASK,
    ConfidenceReport,
    RngStream,
    Side,
)
from .judge import (
    JudgeParams,
    StaircaseState,
    Stimulus,
    confidence_to_step,
    judge_confidence,
    perceive,
    staircase_update,
)
from .metrics import SessionLog, TrialRecord, influence, InsufficientTrialsError
from .models import (
    EstimatorState,
    Variant,
    bayes_posterior,
    conf_to_prob,
    preprocess_confidence,
    predict_post_confidence,
)

DEFAULT_ADVISORS = {
    1: ("acc_cal", "acc_uncal", "inacc_cal", "inacc_uncal"),
    2: ("hiacc_hiagr", "hiacc_loagr", "loacc_hiagr", "loacc_loagr"),
    3: ("bias_sharing", "unbiased", "anti_bias"),
}

# (blocks, trials per block incl. null trials, null trials per block,
#  practice trials, scale steps); practice is two short blocks
DEFAULT_SHAPE = {
    1: (10, 50, 10, 100, 5),
    2: (10, 44, 4, 20, 5),
    3: (12, 35, 5, 50, 50),
}

ALL_VARIANTS = (Variant.ACCURACY, Variant.CONSENSUS, Variant.CONFIDENCE)


@dataclass
class SessionConfig:
    experiment: int = 1
    advisors: Sequence = ()
    blocks: Optional[int] = None
    trials_per_block: Optional[int] = None
    # null trials count toward trials_per_block but are not simulated
    null_trials_per_block: Optional[int] = None
    practice_trials: Optional[int] = None
    feedback: bool = False
    judge: JudgeParams = field(default_factory=JudgeParams)
    staircase: StaircaseState = field(default_factory=StaircaseState)
    variants: Sequence[Variant] = ALL_VARIANTS
    scale_steps: Optional[int] = None
    # Exp3: number of previous blocks whose ratings define the bins
    rebin_window: int = 2

    def __post_init__(self):
        if self.experiment not in (1, 2, 3):
            raise ValueError(f"experiment must be 1, 2 or 3, got {self.experiment}")
        blocks, tpb, nulls, practice, steps = DEFAULT_SHAPE[self.experiment]
        if not self.advisors:
            self.advisors = DEFAULT_ADVISORS[self.experiment]
        self.blocks = blocks if self.blocks is None else self.blocks
        self.trials_per_block = tpb if self.trials_per_block is None else self.trials_per_block
        if self.null_trials_per_block is None:
            self.null_trials_per_block = min(nulls, self.trials_per_block - len(self.advisors))
        self.practice_trials = practice if self.practice_trials is None else self.practice_trials
        self.scale_steps = steps if self.scale_steps is None else self.scale_steps
        if self.judge.scale_steps != self.scale_steps:
            self.judge = replace(self.judge, scale_steps=self.scale_steps)
        self.variants = tuple(Variant(v) for v in self.variants)
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def encounters_per_block(self) -> int:
        return (self.trials_per_block - self.null_trials_per_block) // len(self.advisors)

    def violations(self, prefix: str = "") -> List[str]:
        out = []
        if self.blocks < 1:
            out.append(f"{prefix}blocks: must be >= 1")
        if self.practice_trials < 0:
            out.append(f"{prefix}practice_trials: must be >= 0")
        advisor_trials = self.trials_per_block - self.null_trials_per_block
        if self.null_trials_per_block < 0 or advisor_trials < len(self.advisors) or advisor_trials % len(self.advisors):
            out.append(
                f"{prefix}trials_per_block: {self.trials_per_block} trials with "
                f"{self.null_trials_per_block} null trials cannot be split evenly over {len(self.advisors)} advisors"
            )
        if self.experiment == 3 and self.scale_steps != 50:
            out.append(f"{prefix}scale_steps: experiment 3 needs the 50-step scale, got {self.scale_steps}")
        if self.scale_steps < 1:
            out.append(f"{prefix}scale_steps: must be >= 1")
        return out

    def roster(self) -> List[Tuple[str, adv.Policy]]:
        out = []
        for entry in self.advisors:
            if isinstance(entry, str):
                out.append((entry, adv.make_policy(entry)))
            else:
                name, table = entry
                out.append((name, adv.make_policy(table)))
        return out


def _post_report(pre: ConfidenceReport, posterior_correct: float) -> ConfidenceReport:
    side = pre.side
    if posterior_correct < 0.5:
        side, posterior_correct = -side, 1.0 - posterior_correct
    return ConfidenceReport(side, confidence_to_step(posterior_correct, pre.scale_steps), pre.scale_steps)


def simulate_session(cfg: SessionConfig, seed: int, session: int = 0) -> SessionLog:
    roster = cfg.roster()
    names = [n for n, _ in roster]
    for name, policy in roster:
        if adv.experiment_of(policy) != cfg.experiment:
            raise ValueError(f"advisor {name!r} does not belong to experiment {cfg.experiment}")
    base = RngStream(seed, (session,))
    task_rng = base.child(STREAM_TASK).generator()
    judge_rng = base.child(STREAM_JUDGE).generator()
    adv_rngs = {n: base.child(STREAM_ADVISOR, i).generator() for i, n in enumerate(names)}

    judge = cfg.judge
    stair = cfg.staircase
    steps = judge.scale_steps
    own = EstimatorState(Variant.ACCURACY if cfg.feedback else Variant.CONFIDENCE)
    log = SessionLog(session=session, experiment=cfg.experiment, roster=names, feedback=cfg.feedback)

    def trial_stimulus():
        truth = Side.A if task_rng.random() < 0.5 else Side.B
        return truth, Stimulus.from_dots(truth, stair.d, judge.dot_scale)

    practice_steps = []
    for _ in range(cfg.practice_trials):
        truth, stim = trial_stimulus()
        _, rep = perceive(judge, stim, judge_rng)
        practice_steps.append(rep.step)
        stair = staircase_update(stair, rep.side is truth)

    block_steps: List[List[int]] = [practice_steps]
    binner = None
    if cfg.experiment == 3:
        binner = adv.ConfidenceBinner(practice_steps or [1])

    trial = 0
    for block in range(cfg.blocks):
        order = [i for i in range(len(roster)) for _ in range(cfg.encounters_per_block)]
        order = [order[k] for k in task_rng.permutation(len(order))]
        decks = {}
        if cfg.experiment == 1:
            decks = {n: adv.ShuffledDeck(p, adv_rngs[n]) for n, p in roster}
        steps_this_block = []
        for idx in order:
            name, policy = roster[idx]
            truth, stim = trial_stimulus()
            d = stair.d
            posterior_pA, pre = perceive(judge, stim, judge_rng)
            correct = pre.side is truth
            if cfg.experiment == 1:
                event = adv.exp1_advise(decks[name], truth, pre.side)
            elif cfg.experiment == 2:
                event = adv.exp2_advise(policy, correct, pre.side, adv_rngs[name])
            else:
                event = adv.exp3_advise(policy, binner, correct, pre, pre.side, adv_rngs[name])

            p_corr = judge_confidence(posterior_pA)
            post_p = bayes_posterior(p_corr, own.theta(name), event.agrees, warn=False)
            post = _post_report(pre, post_p)
            own.update(name, event, p_corr=p_corr, feedback=correct if cfg.feedback else None)
            stair = staircase_update(stair, correct)
            log.append(
                TrialRecord(
                    trial=trial,
                    advisor=name,
                    truth=truth,
                    pre=pre,
                    advice=event,
                    post=post,
                    feedback=cfg.feedback,
                    block=block,
                    d=d,
                    pre_posterior=posterior_pA,
                    theta={"own": own.theta(name)},
                )
            )
            steps_this_block.append(pre.step)
            trial += 1
        block_steps.append(steps_this_block)
        if binner is not None:
            recent = [s for b in block_steps[-cfg.rebin_window:] for s in b]
            if len(recent) >= 10:
                binner = adv.rebin(binner, recent) if len(set(recent)) > 1 else binner
    apply_models(log, cfg.variants, steps)
    return log


def apply_models(log: SessionLog, variants: Sequence[Variant], scale_steps: int) -> SessionLog:
    """Replay estimator variants over a session, filling theta and model predictions."""
    if not log.records:
        return log
    mapping = preprocess_confidence([r.pre.step for r in log.records], scale_steps)
    for variant in variants:
        variant = Variant(variant)
        state = EstimatorState(variant)
        for r in log.records:
            p_corr = conf_to_prob(mapping[r.pre.step], scale_steps)
            posterior = bayes_posterior(p_corr, state.theta(r.advisor), r.advice.agrees, warn=False)
            r.model_post[variant.value] = predict_post_confidence(r.pre, posterior, mapping)
            state.update(r.advisor, r.advice, p_corr=p_corr, feedback=r.pre_correct)
            r.theta[variant.value] = state.theta(r.advisor)
            acc = state.advisors[r.advisor]
            r.evidence[variant.value] = (acc.alpha, acc.beta, acc.encounters)
    return log


def run_sessions(
    experiment: int,
    n_sessions: int,
    seed: int,
    feedback: Optional[bool] = None,
    **kwargs,
) -> List[SessionLog]:
    """Simulate several sessions; ``feedback=None`` alternates the two conditions."""
    logs = []
    for s in range(n_sessions):
        fb = (s % 2 == 0) if feedback is None else feedback
        cfg = SessionConfig(experiment=experiment, feedback=fb, **kwargs)
        logs.append(simulate_session(cfg, seed, s))
    return logs


def final_thetas(logs: Sequence[SessionLog], variant: str) -> Dict[str, np.ndarray]:
    """Final theta per advisor, one entry per session."""
    variant = Variant(variant).value if variant != "own" else "own"
    roster = logs[0].roster
    return {a: np.array([log.final_theta(variant, a) for log in logs]) for a in roster}


def session_summary(log: SessionLog) -> List[dict]:
    rows = []
    for a in log.roster:
        try:
            infl = influence(log, a)
        except InsufficientTrialsError:
            infl = float("nan")
        row = {"session": log.session, "advisor": a, "influence": infl}
        for v in ("acc", "cons", "conf"):
            row[f"final_theta_{v}"] = log.final_theta(v, a)
        row["trust_proxy"] = log.final_theta("own", a)
        recs = log.for_advisor(a)
        row["advisor_accuracy"] = float(np.mean([r.advice.advisor_correct for r in recs])) if recs else float("nan")
        row["agreement_rate"] = float(np.mean([r.advice.agrees for r in recs])) if recs else float("nan")
        rows.append(row)
    return rows
