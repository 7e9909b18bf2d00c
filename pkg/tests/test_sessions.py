import numpy as np
import pytest

from trustlab.core import Side
from trustlab.sessions import SessionConfig, final_thetas, run_sessions, session_summary, simulate_session


@pytest.mark.parametrize("exp,blocks,tpb", [(1, 10, 50), (2, 10, 44), (3, 12, 35)])
def test_default_shapes(exp, blocks, tpb):
    cfg = SessionConfig(experiment=exp)
    assert (cfg.blocks, cfg.trials_per_block) == (blocks, tpb)
    assert cfg.encounters_per_block * len(cfg.advisors) + cfg.null_trials_per_block == tpb


def test_exp1_session_counts():
    cfg = SessionConfig(experiment=1)
    log = simulate_session(cfg, seed=1)
    assert len(log.records) == 10 * 40
    for a in log.roster:
        assert len(log.for_advisor(a)) == 100


def test_exp3_requires_fifty_steps():
    with pytest.raises(ValueError, match="scale_steps"):
        SessionConfig(experiment=3, scale_steps=5)


def test_uneven_split_rejected():
    with pytest.raises(ValueError, match="trials_per_block"):
        SessionConfig(experiment=1, trials_per_block=41, null_trials_per_block=0)


def test_wrong_advisor_family():
    cfg = SessionConfig(experiment=2, advisors=("acc_cal", "acc_uncal"), trials_per_block=20, null_trials_per_block=0)
    with pytest.raises(ValueError, match="experiment"):
        simulate_session(cfg, 0)


def test_session_deterministic():
    a = simulate_session(SessionConfig(experiment=2, blocks=2), 5, 3)
    b = simulate_session(SessionConfig(experiment=2, blocks=2), 5, 3)
    assert [(r.pre, r.post, r.advice, r.theta) for r in a.records] == [(r.pre, r.post, r.advice, r.theta) for r in b.records]


def test_records_carry_evidence():
    log = simulate_session(SessionConfig(experiment=1, blocks=1), 2)
    for r in log.records:
        for v in ("acc", "cons", "conf"):
            alpha, beta, n = r.evidence[v]
            assert alpha + beta == pytest.approx(n, abs=1e-9)
            assert r.theta[v] == pytest.approx(alpha / (alpha + beta))


def test_judge_calibration_within_session():
    # accuracy rises with confidence step, which is what the confidence model exploits
    logs = run_sessions(2, 10, seed=8)
    recs = [r for log in logs for r in log.records]
    steps = np.array([r.pre.step for r in recs])
    correct = np.array([r.pre_correct for r in recs])
    acc = [correct[steps == s].mean() for s in range(1, 6) if (steps == s).sum() > 30]
    assert np.all(np.diff(acc) > 0)


def test_exp2_rates_with_staircased_judge():
    from trustlab.advisors import EXP2_PROFILES

    logs = run_sessions(2, 100, seed=4, feedback=True, variants=())

    judge_acc = np.mean([r.pre_correct for log in logs for r in log.records])
    for a in logs[0].roster:
        recs = [r for log in logs for r in log.for_advisor(a)]
        assert len(recs) >= 10000
        exp_acc, exp_agr = EXP2_PROFILES[a].expected_rates(judge_acc)
        assert np.mean([r.advice.advisor_correct for r in recs]) == pytest.approx(exp_acc, abs=0.02)
        assert np.mean([r.advice.agrees for r in recs]) == pytest.approx(exp_agr, abs=0.02)


def test_exp3_rates_matched():
    logs = run_sessions(3, 84, seed=4, variants=())
    rates = {}
    for a in logs[0].roster:
        recs = [r for log in logs for r in log.for_advisor(a)]
        assert len(recs) >= 10000
        rates[a] = (np.mean([r.advice.advisor_correct for r in recs]), np.mean([r.advice.agrees for r in recs]))
    accs = [v[0] for v in rates.values()]
    agrs = [v[1] for v in rates.values()]
    assert max(accs) - min(accs) <= 0.02
    assert max(agrs) - min(agrs) <= 0.02


def test_summary_rows():
    logs = run_sessions(1, 2, seed=3)
    rows = session_summary(logs[0])
    assert {r["advisor"] for r in rows} == set(logs[0].roster)
    th = final_thetas(logs, "acc")
    assert all(len(v) == 2 for v in th.values())
