import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trustlab.abm import world as W
from trustlab.abm.world import (
    AgentState,
    BiasIndicator,
    Draws,
    EmptyGroupError,
    FeedbackEstimate,
    Group,
    PartnerSelection,
    WorldConfig,
    bias_update,
    clustering,
    clustering_matrix,
    draw_signal,
    estimated_feedback,
    groups_for,
    make_draws,
    perceive_from_noise,
    pick_partner,
    run_world,
    run_world_draws,
    select_partner,
    social_update,
    trust_update,
    world_rng,
)
from trustlab.core import RngStream


def test_signal_zero_strength():
    rng = RngStream(0, (0,)).generator()
    assert all(draw_signal(0.0, rng) == 0.0 for _ in range(100))
    xs = [draw_signal(2.0, rng) for _ in range(1000)]
    assert -1.0 <= min(xs) and max(xs) <= 1.0


def test_perceive_examples():
    assert perceive_from_noise(0.5, 0.0, 0.0, 1.3) == (0.5, 0.5)
    p, c = perceive_from_noise(0.9, 0.0, 0.0, 0.0)
    assert p == pytest.approx(0.9)
    p, _ = perceive_from_noise(0.1, 0.0, 60.0, 0.0)
    assert p == pytest.approx(1.0, abs=1e-12)


def test_pick_partner_two_agents():
    for u in (0.0, 0.3, 0.999):
        assert pick_partner([0.0, 0.5], 0, PartnerSelection.RANDOM, u) == (1, False)
        assert pick_partner([0.5, 0.0], 1, PartnerSelection.TRUST_PROPORTIONAL, u) == (0, False)


def test_trust_proportional_ratio():
    rng = RngStream(3, (0,)).generator()
    picks = [pick_partner([0.0, 0.9, 0.1], 0, PartnerSelection.TRUST_PROPORTIONAL, rng.random())[0] for _ in range(10000)]
    n1 = picks.count(1)
    assert n1 / 10000 == pytest.approx(0.9, abs=0.01)


def test_random_selection_uniform():
    rng = RngStream(4, (0,)).generator()
    picks = [pick_partner([0.5] * 5, 2, PartnerSelection.RANDOM, rng.random())[0] for _ in range(20000)]
    counts = np.bincount(picks, minlength=5)
    assert counts[2] == 0
    assert np.allclose(counts[[0, 1, 3, 4]] / 20000, 0.25, atol=0.015)


def test_zero_trust_falls_back_with_warning():
    agent = AgentState(0, 0.1, 0.5, Group.POP1, {1: 0.0, 2: 0.0})
    with pytest.warns(RuntimeWarning):
        j = select_partner(agent, PartnerSelection.TRUST_PROPORTIONAL, RngStream(1, (0,)).generator())
    assert j in (1, 2)


def test_social_update_examples():
    assert social_update(0.7, 0.5, 0.9, False) == pytest.approx(0.7)
    assert social_update(0.7, 0.95, 0.0, True) == pytest.approx(0.7)
    assert social_update(0.8, 0.8, 0.5, False) == pytest.approx(0.941176470588, abs=1e-9)


def test_estimated_feedback_examples():
    conf = FeedbackEstimate.AGREEMENT_IN_CONFIDENCE
    assert estimated_feedback(True, 0.5, conf) == 0.5
    assert estimated_feedback(False, 0.9, conf) == pytest.approx(0.1)
    assert estimated_feedback(True, 0.6, FeedbackEstimate.AGREEMENT) == 1.0
    with pytest.raises(ValueError):
        estimated_feedback(True, 0.2, conf)


def test_trust_update_examples():
    assert trust_update(0.5, 0.5, 0.3) == 0.5
    assert trust_update(0.5, 1.0, 0.1) == pytest.approx(0.55)
    with pytest.raises(ValueError):
        trust_update(0.5, 1.0, 0.0)


def test_bias_update_examples():
    assert bias_update(0.3, 0.2, True, True, BiasIndicator.DISCRETE, 0.1) == pytest.approx(0.37)
    assert bias_update(0.3, 0.5, False, False, BiasIndicator.DISCRETE, 0.1) == pytest.approx(0.37)
    assert bias_update(0.3, 0.3, False, False, BiasIndicator.CONTINUOUS, 0.1) == pytest.approx(0.3)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 1))
def test_updates_stay_in_unit_interval(theta, F, alpha):
    assert 0.0 <= trust_update(theta, F, alpha) <= 1.0
    for ind in BiasIndicator:
        for fb in (True, False):
            assert 0.0 <= bias_update(theta, F, fb, True, ind, alpha) <= 1.0


def test_clustering_examples():
    g = [0, 0, 1, 1]
    T = np.full((4, 4), 0.5)
    np.fill_diagonal(T, 0)
    assert clustering_matrix(T, g) == pytest.approx(0.5)
    T = np.array([[0, 0.6, 0.3, 0.3], [0.6, 0, 0.3, 0.3], [0.3, 0.3, 0, 0.6], [0.3, 0.3, 0.6, 0]])
    assert clustering_matrix(T, g) == pytest.approx(2 / 3)
    T = np.array([[0, 0.6, 0, 0], [0.6, 0, 0, 0], [0, 0, 0, 0.6], [0, 0, 0.6, 0]], dtype=float)
    assert clustering_matrix(T, g) == pytest.approx(1.0)
    with pytest.raises(EmptyGroupError):
        clustering_matrix(T, [0, 0, 0, 0])


def test_clustering_from_agents():
    agents = [
        AgentState(0, 0.1, 0.5, Group.POP1, {1: 0.6, 2: 0.3}),
        AgentState(1, 0.1, 0.5, Group.POP1, {0: 0.6, 2: 0.3}),
        AgentState(2, 0.1, 0.5, Group.POP2, {0: 0.3, 1: 0.3}),
    ]
    # the lone Pop2 agent has no in-group partner and is skipped
    assert clustering(agents) == pytest.approx(2 / 3)


def test_config_violations():
    assert WorldConfig().violations() == []
    v = WorldConfig(p_feedback=1.2).violations()
    assert len(v) == 1 and v[0].startswith("p_feedback")
    assert any(x.startswith("topology") for x in WorldConfig(topology="lattice").violations())
    with pytest.raises(ValueError):
        WorldConfig(n_agents=1).validate()


def test_groups_split():
    assert list(groups_for(5)) == [0, 0, 0, 1, 1]


def test_run_world_deterministic():
    cfg = WorldConfig(iterations=200, bias_update_start=100)
    a, b = run_world(cfg, 9), run_world(cfg, 9)
    np.testing.assert_array_equal(a.clustering, b.clustering)
    np.testing.assert_array_equal(a.final_trust, b.final_trust)
    assert not np.array_equal(a.clustering, run_world(cfg, 10).clustering)


small_worlds = st.builds(
    WorldConfig,
    n_agents=st.integers(2, 7),
    signal_strength=st.floats(0, 3),
    p_feedback=st.floats(0, 1),
    learning_rate=st.floats(0.01, 1),
    iterations=st.integers(1, 40),
    bias_update_start=st.one_of(st.none(), st.integers(0, 1)),
    partner_selection=st.sampled_from(list(PartnerSelection)),
    discounting=st.booleans(),
    feedback_estimate=st.sampled_from(list(FeedbackEstimate)),
    bias_indicator=st.sampled_from(list(BiasIndicator)),
    noise_sigma=st.floats(0, 3),
)


@given(small_worlds, st.integers(0, 2**32))
def test_trust_and_bias_bounded(cfg, seed):
    res = run_world(cfg, seed, backend="python")
    assert np.all((res.final_trust >= 0) & (res.final_trust <= 1))
    assert np.all((res.final_priors >= 0) & (res.final_priors <= 1))
    assert np.all(np.diag(res.final_trust) == 0)
    assert np.all((res.accuracy_pre >= 0) & (res.accuracy_pre <= 1))


def test_mirror_symmetry():
    cfg = WorldConfig(iterations=300, bias_update_start=100, partner_selection="trust_proportional",
                      bias_indicator="continuous", noise_sigma=0.5)
    d = make_draws(cfg, world_rng(5))
    mirrored = Draws(1.0 - d.priors, -d.signals, ~d.truth_A, -d.z, d.u_select, d.u_feedback)
    a = run_world_draws(cfg, d, backend="python")
    b = run_world_draws(cfg, mirrored, backend="python")
    np.testing.assert_allclose(b.final_priors, 1.0 - a.final_priors, atol=1e-9)
    np.testing.assert_allclose(b.final_trust, a.final_trust, atol=1e-9)
    np.testing.assert_allclose(b.clustering, a.clustering, atol=1e-9)
    np.testing.assert_array_equal(b.accuracy_pre, a.accuracy_pre)


def test_feedback_trust_tracks_accuracy():
    cfg = WorldConfig(p_feedback=1.0, pop1_bias_range=(0.5, 0.5), pop2_bias_range=(0.5, 0.5),
                      noise_sigma=0.3, pop2_noise_sigma=1.0, bias_update_start=None, iterations=2000)
    d = make_draws(cfg, world_rng(2))
    res = run_world_draws(cfg, d)
    # with neutral priors an agent is correct when its noisy evidence points at the truth
    sigma = np.where(groups_for(cfg.n_agents) == 0, 0.3, 1.0)
    x = d.signals[:, None] + sigma * d.z
    correct = np.where(x == 0, True, (x > 0) == d.truth_A[:, None])
    acc = correct.mean(axis=0)
    n = cfg.n_agents
    trust_in = np.array([res.final_trust[np.arange(n) != j, j].mean() for j in range(n)])
    # each edge is a noisy running average, so compare on average and by rank
    assert np.mean(np.abs(trust_in - acc)) < 0.03
    assert np.corrcoef(trust_in, acc)[0, 1] > 0.9
    assert res.clustering[-1] == pytest.approx(0.5, abs=0.05)


def test_noisier_pop2_is_trusted_less():
    vals = []
    for s2 in (0.1, 2.0):
        cfg = WorldConfig(pop1_bias_range=(0.5, 0.5), pop2_bias_range=(0.5, 0.5), noise_sigma=0.5,
                          pop2_noise_sigma=s2, bias_update_start=None)
        vals.append(np.mean([run_world(cfg, 3, key=(r,)).trust_in_pop2[-1] for r in range(5)]))
    assert vals[0] > vals[1]


def test_agents_view_round_trip():
    res = run_world(WorldConfig(iterations=50, bias_update_start=20), 1)
    agents = res.agents()
    assert clustering(agents) == pytest.approx(res.clustering[-1], abs=1e-12)
