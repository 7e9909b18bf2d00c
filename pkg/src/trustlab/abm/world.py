"""Network of agents that learn whom to trust from agreement or feedback.

Each iteration every agent perceives one shared signal through its own
noise and its prior (bias), picks a partner, folds the partner's perceptual
judgment into its own, and then updates its trust in that partner with a
delta rule.  The teaching signal is the partner's actual correctness when
feedback is available and an agreement estimate otherwise.  From a chosen
iteration on, agents may also move their prior toward the outcome they
observed or believed.

All agents read the previous iteration's state, so agent order does not
matter.  The heavy loop lives in the backend kernel; the functions below are
the single-step definitions it follows.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core import STREAM_ABM, RngStream, TrustlabError, combine_odds, logistic


class Group(enum.IntEnum):
    POP1 = 0
    POP2 = 1


class PartnerSelection(str, enum.Enum):
    RANDOM = "random"
    TRUST_PROPORTIONAL = "trust_proportional"


class FeedbackEstimate(str, enum.Enum):
    AGREEMENT = "agreement"
    AGREEMENT_IN_CONFIDENCE = "agreement_in_confidence"


class BiasIndicator(str, enum.Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class Topology(str, enum.Enum):
    FULLY_CONNECTED = "fully_connected"
    LATTICE = "lattice"


class EmptyGroupError(TrustlabError, ValueError):
    pass


INITIAL_TRUST = 0.5


@dataclass
class AgentState:
    id: int
    noise_sigma: float
    prior_pA: float
    group: Group
    trust_out: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not 0.0 <= self.prior_pA <= 1.0:
            raise ValueError("prior_pA must lie in [0, 1]")
        self.group = Group(self.group)


@dataclass(frozen=True)
class WorldConfig:
    n_agents: int = 20
    signal_strength: float = 1.0
    p_feedback: float = 0.0
    learning_rate: float = 0.1
    iterations: int = 1000
    # None disables the bias update
    bias_update_start: Optional[int] = 500
    partner_selection: PartnerSelection = PartnerSelection.RANDOM
    discounting: bool = False
    feedback_estimate: FeedbackEstimate = FeedbackEstimate.AGREEMENT_IN_CONFIDENCE
    bias_indicator: BiasIndicator = BiasIndicator.DISCRETE
    pop1_bias_range: Tuple[float, float] = (0.0, 0.5)
    pop2_bias_range: Tuple[float, float] = (0.5, 1.0)
    noise_sigma: float = 0.1
    # None gives Pop2 the same noise as Pop1
    pop2_noise_sigma: Optional[float] = None
    sigmoid_slope: float = 1.0
    topology: Topology = Topology.FULLY_CONNECTED

    def __post_init__(self):
        # accept plain strings from config files
        object.__setattr__(self, "partner_selection", PartnerSelection(self.partner_selection))
        object.__setattr__(self, "feedback_estimate", FeedbackEstimate(self.feedback_estimate))
        object.__setattr__(self, "bias_indicator", BiasIndicator(self.bias_indicator))
        object.__setattr__(self, "topology", Topology(self.topology))
        object.__setattr__(self, "pop1_bias_range", tuple(float(x) for x in self.pop1_bias_range))
        object.__setattr__(self, "pop2_bias_range", tuple(float(x) for x in self.pop2_bias_range))

    @property
    def pop2_sigma(self) -> float:
        return self.noise_sigma if self.pop2_noise_sigma is None else self.pop2_noise_sigma

    def violations(self, prefix: str = "") -> List[str]:
        """Every invariant violation as ``field: message``; empty means valid."""
        out = []

        def bad(name, msg):
            out.append(f"{prefix}{name}: {msg}")

        if int(self.n_agents) != self.n_agents or self.n_agents < 2:
            bad("n_agents", "must be an integer >= 2")
        if not self.signal_strength >= 0:
            bad("signal_strength", "must be >= 0")
        if not 0.0 <= self.p_feedback <= 1.0:
            bad("p_feedback", f"must lie in [0, 1], got {self.p_feedback}")
        if not 0.0 < self.learning_rate <= 1.0:
            bad("learning_rate", "must lie in (0, 1]")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            bad("iterations", "must be a positive integer")
        # a start at or past the last iteration simply never updates the bias
        if self.bias_update_start is not None and self.bias_update_start < 0:
            bad("bias_update_start", "must be >= 0")
        for name in ("pop1_bias_range", "pop2_bias_range"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo <= hi <= 1.0:
                bad(name, f"must be an interval inside [0, 1], got {(lo, hi)}")
        if not self.noise_sigma >= 0:
            bad("noise_sigma", "must be >= 0")
        if self.pop2_noise_sigma is not None and not self.pop2_noise_sigma >= 0:
            bad("pop2_noise_sigma", "must be >= 0")
        if not self.sigmoid_slope > 0:
            bad("sigmoid_slope", "must be > 0")
        if self.topology is not Topology.FULLY_CONNECTED:
            bad("topology", "only the fully connected network is implemented")
        return out

    def validate(self) -> "WorldConfig":
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, enum.Enum):
                d[k] = v.value
            elif isinstance(v, tuple):
                d[k] = list(v)
        return d


# ---------------------------------------------------------------- single steps


def draw_signal(strength: float, rng: np.random.Generator) -> float:
    if strength < 0:
        raise ValueError("signal strength must be >= 0")
    return float(strength * (rng.random() - 0.5))


def perceive_from_noise(prior_pA: float, noise_sigma: float, s: float, z: float, slope: float = 1.0):
    """Posterior p'(A) and confidence for a given standard normal draw ``z``."""
    evidence = logistic(slope * (s + noise_sigma * z))
    p = combine_odds(prior_pA, evidence)
    return p, 0.5 + abs(p - 0.5)


def perceive_abm(agent: AgentState, s: float, rng: np.random.Generator, slope: float = 1.0):
    return perceive_from_noise(agent.prior_pA, agent.noise_sigma, s, float(rng.standard_normal()), slope)


def pick_partner(trust_row: Sequence[float], self_index: int, mode: PartnerSelection, u: float) -> Tuple[int, bool]:
    """Partner index from one uniform draw ``u``; the flag marks a zero-trust fallback.

    Random mode is uniform over the others.  Trust-proportional mode picks
    ``j`` with probability ``theta_ij / sum_k theta_ik``; if all trust is zero
    it falls back to uniform.
    """
    n = len(trust_row)
    if mode is PartnerSelection.TRUST_PROPORTIONAL:
        total = 0.0
        for j in range(n):
            if j != self_index:
                total += trust_row[j]
        if total > 0.0:
            target = u * total
            acc = 0.0
            last = -1
            for j in range(n):
                if j == self_index or trust_row[j] <= 0.0:
                    continue
                acc += trust_row[j]
                last = j
                if target < acc:
                    return j, False
            # rounding can leave target == total
            return last, False
        fallback = True
    else:
        fallback = False
    j = int(u * (n - 1))
    if j >= n - 1:
        j = n - 2
    if j >= self_index:
        j += 1
    return j, fallback


def select_partner(agent: AgentState, mode: PartnerSelection, rng: np.random.Generator) -> int:
    """Id of the agent to take advice from."""
    others = sorted(agent.trust_out)
    if not others:
        raise ValueError("agent has nobody to interact with")
    row = [agent.trust_out[o] for o in others] + [0.0]
    j, fallback = pick_partner(row, len(others), PartnerSelection(mode), float(rng.random()))
    if fallback:
        warnings.warn("all trust is zero; selecting a partner uniformly", RuntimeWarning, stacklevel=2)
    return others[j]


def social_evidence(advisor_p: float, theta: float, discounting: bool) -> float:
    if discounting:
        return 0.5 + theta * (advisor_p - 0.5)
    return advisor_p


def social_update(agent_p: float, advisor_p: float, theta: float, discounting: bool) -> float:
    """Combine the agent's judgment with (optionally trust-discounted) advice."""
    return combine_odds(agent_p, social_evidence(advisor_p, theta, discounting))


def estimated_feedback(agrees: bool, confidence: float, mode: FeedbackEstimate) -> float:
    if FeedbackEstimate(mode) is FeedbackEstimate.AGREEMENT:
        return 1.0 if agrees else 0.0
    if not 0.5 <= confidence <= 1.0:
        raise ValueError(f"confidence must lie in [0.5, 1], got {confidence}")
    return confidence if agrees else 1.0 - confidence


def trust_update(theta: float, F: float, alpha: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return theta + alpha * (F - theta)


def bias_update(
    prior_pA: float,
    final_belief: float,
    feedback_available: bool,
    truth_is_A: bool,
    indicator: BiasIndicator,
    alpha: float,
) -> float:
    if feedback_available:
        target = 1.0 if truth_is_A else 0.0
    elif BiasIndicator(indicator) is BiasIndicator.DISCRETE:
        target = 1.0 if final_belief >= 0.5 else 0.0
    else:
        target = final_belief
    return prior_pA + alpha * (target - prior_pA)


def clustering_rows(rows: Sequence[Sequence[float]], groups: Sequence[int]) -> float:
    """Mean over agents of in-group / (in-group + out-group) mean trust.

    Agents with no other in-group member are skipped; equal zero trust
    counts as no preference.
    """
    n = len(groups)
    total = 0.0
    counted = 0
    for i in range(n):
        s_in = s_out = 0.0
        n_in = n_out = 0
        gi = groups[i]
        row = rows[i]
        for j in range(n):
            if j == i:
                continue
            if groups[j] == gi:
                s_in += row[j]
                n_in += 1
            else:
                s_out += row[j]
                n_out += 1
        if n_in == 0 or n_out == 0:
            continue
        m_in = s_in / n_in
        m_out = s_out / n_out
        denom = m_in + m_out
        total += 0.5 if denom <= 0.0 else m_in / denom
        counted += 1
    return total / counted if counted else float("nan")


def clustering_matrix(trust: np.ndarray, groups: Sequence[int]) -> float:
    groups = [int(g) for g in groups]
    if Group.POP1 not in groups or Group.POP2 not in groups:
        raise EmptyGroupError("clustering needs both groups to be non-empty")
    return clustering_rows(np.asarray(trust, dtype=float).tolist(), groups)


def clustering(agents: Sequence[AgentState]) -> float:
    ids = [a.id for a in agents]
    index = {a: k for k, a in enumerate(ids)}
    trust = np.zeros((len(ids), len(ids)))
    for a in agents:
        for j, t in a.trust_out.items():
            trust[index[a.id], index[j]] = t
    return clustering_matrix(trust, [int(a.group) for a in agents])


# ---------------------------------------------------------------- whole runs


@dataclass
class Draws:
    """Every random number a run consumes, drawn up front."""

    priors: np.ndarray  # (n,)
    signals: np.ndarray  # (T,)
    truth_A: np.ndarray  # (T,) bool, only consulted when a signal is exactly 0
    z: np.ndarray  # (T, n)
    u_select: np.ndarray  # (T, n)
    u_feedback: np.ndarray  # (T, n)


def groups_for(n: int) -> np.ndarray:
    """First half Pop1, second half Pop2 (Pop1 gets the extra agent when n is odd)."""
    g = np.ones(n, dtype=np.int64)
    g[: (n + 1) // 2] = Group.POP1
    return g


def make_draws(config: WorldConfig, rng: np.random.Generator) -> Draws:
    n, T = config.n_agents, config.iterations
    groups = groups_for(n)
    u = rng.random(n)
    lo = np.where(groups == Group.POP1, config.pop1_bias_range[0], config.pop2_bias_range[0])
    hi = np.where(groups == Group.POP1, config.pop1_bias_range[1], config.pop2_bias_range[1])
    priors = lo + (hi - lo) * u
    signals = config.signal_strength * (rng.random(T) - 0.5)
    truth_A = rng.random(T) < 0.5
    truth_A = np.where(signals > 0, True, np.where(signals < 0, False, truth_A))
    z = rng.standard_normal((T, n))
    u_select = rng.random((T, n))
    u_feedback = rng.random((T, n))
    return Draws(priors, signals, truth_A, z, u_select, u_feedback)


@dataclass
class WorldResult:
    config: WorldConfig
    groups: np.ndarray
    initial_priors: np.ndarray
    final_priors: np.ndarray
    final_trust: np.ndarray
    # per-iteration series, measured after that iteration's updates
    clustering: np.ndarray
    mean_pA_pop1: np.ndarray
    mean_pA_pop2: np.ndarray
    accuracy_pre: np.ndarray
    accuracy_post: np.ndarray
    trust_in_pop2: np.ndarray
    fallbacks: int = 0

    def initial_group_means(self) -> Tuple[float, float]:
        g = self.groups
        return float(self.initial_priors[g == 0].mean()), float(self.initial_priors[g == 1].mean())

    def summary(self) -> Dict[str, float]:
        g = self.groups
        off = ~np.eye(len(g), dtype=bool)
        return {
            "clustering": float(self.clustering[-1]),
            "bias_extremity_pop1": abs(float(self.mean_pA_pop1[-1]) - 0.5),
            "bias_extremity_pop2": abs(float(self.mean_pA_pop2[-1]) - 0.5),
            "mean_pA_pop1": float(self.mean_pA_pop1[-1]),
            "mean_pA_pop2": float(self.mean_pA_pop2[-1]),
            "accuracy_pre": float(self.accuracy_pre.mean()),
            "accuracy_post": float(self.accuracy_post.mean()),
            "advice_benefit": float((self.accuracy_post - self.accuracy_pre).mean()),
            "mean_trust": float(self.final_trust[off].mean()),
            "trust_in_pop2": float(self.trust_in_pop2[-1]),
        }

    def agents(self) -> List[AgentState]:
        n = len(self.groups)
        sig = np.where(self.groups == 0, self.config.noise_sigma, self.config.pop2_sigma)
        return [
            AgentState(
                id=i,
                noise_sigma=float(sig[i]),
                prior_pA=float(self.final_priors[i]),
                group=Group(int(self.groups[i])),
                trust_out={j: float(self.final_trust[i, j]) for j in range(n) if j != i},
            )
            for i in range(n)
        ]


def world_rng(seed: int, key: Tuple[int, ...] = ()) -> np.random.Generator:
    return RngStream(seed, (STREAM_ABM,) + tuple(key)).generator()


def run_world(config: WorldConfig, seed: int, key: Tuple[int, ...] = (), backend: Optional[str] = None) -> WorldResult:
    """Simulate one world; ``key`` picks an independent stream (e.g. cell, replicate)."""
    config.validate()
    draws = make_draws(config, world_rng(seed, key))
    return run_world_draws(config, draws, backend=backend)


def run_world_draws(config: WorldConfig, draws: Draws, backend: Optional[str] = None) -> WorldResult:
    from . import backend as _backend

    n, T = config.n_agents, config.iterations
    groups = groups_for(n)
    noise = np.where(groups == Group.POP1, config.noise_sigma, config.pop2_sigma).astype(float)
    priors = np.array(draws.priors, dtype=float)
    trust = np.full((n, n), INITIAL_TRUST)
    np.fill_diagonal(trust, 0.0)
    out = {k: np.zeros(T) for k in ("clustering", "m1", "m2", "acc_pre", "acc_post", "trust2")}
    kernel = _backend.get_kernel(backend)
    fallbacks = kernel(
        priors,
        noise,
        groups,
        trust,
        np.ascontiguousarray(draws.signals, dtype=float),
        np.ascontiguousarray(draws.truth_A, dtype=np.uint8),
        np.ascontiguousarray(draws.z, dtype=float),
        np.ascontiguousarray(draws.u_select, dtype=float),
        np.ascontiguousarray(draws.u_feedback, dtype=float),
        float(config.learning_rate),
        float(config.sigmoid_slope),
        float(config.p_feedback),
        int(config.partner_selection is PartnerSelection.TRUST_PROPORTIONAL),
        int(bool(config.discounting)),
        int(config.feedback_estimate is FeedbackEstimate.AGREEMENT_IN_CONFIDENCE),
        int(config.bias_indicator is BiasIndicator.CONTINUOUS),
        -1 if config.bias_update_start is None else int(config.bias_update_start),
        out["clustering"],
        out["m1"],
        out["m2"],
        out["acc_pre"],
        out["acc_post"],
        out["trust2"],
    )
    if fallbacks:
        warnings.warn(f"{fallbacks} partner choices fell back to uniform (all trust zero)", RuntimeWarning, stacklevel=2)
    return WorldResult(
        config=config,
        groups=groups,
        initial_priors=np.array(draws.priors, dtype=float),
        final_priors=priors,
        final_trust=trust,
        clustering=out["clustering"],
        mean_pA_pop1=out["m1"],
        mean_pA_pop2=out["m2"],
        accuracy_pre=out["acc_pre"],
        accuracy_post=out["acc_post"],
        trust_in_pop2=out["trust2"],
        fallbacks=int(fallbacks),
    )
