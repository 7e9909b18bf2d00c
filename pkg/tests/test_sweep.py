import numpy as np
import pytest

from trustlab.abm.sweep import SUMMARY_KEYS, SweepGrid, run_sweep
from trustlab.abm.world import WorldConfig, run_world

BASE = WorldConfig(iterations=200, bias_update_start=100)


def test_single_cell_reduces_to_run_world():
    res = run_sweep(SweepGrid(BASE, {}, replications=1, seed=3))
    direct = run_world(BASE, 3, key=(0, 0)).summary()
    assert len(res.cells) == 1
    for k in SUMMARY_KEYS:
        assert res.cells[0][k] == direct[k]
        assert res.replicates[0][k] == direct[k]


def test_cells_and_replicates_shape():
    grid = SweepGrid(BASE, {"p_feedback": [0.0, 1.0], "noise_sigma": [0.1, 0.5, 1.0]}, replications=3)
    res = run_sweep(grid)
    assert len(res.cells) == 6 and len(res.replicates) == 18
    assert [c["cell"] for c in res.cells] == list(range(6))
    assert res.cells[1]["p_feedback"] == 0.0 and res.cells[1]["noise_sigma"] == 0.5
    row = res.cells[4]
    vals = [r["clustering"] for r in res.replicates if r["cell"] == 4]
    assert row["clustering"] == pytest.approx(np.mean(vals))
    assert row["clustering_sd"] == pytest.approx(np.std(vals, ddof=1))


def test_workers_do_not_change_results():
    grid = SweepGrid(BASE, {"p_feedback": [0.0, 0.5]}, replications=3, seed=1)
    a = run_sweep(grid, workers=1)
    b = run_sweep(grid, workers=3)
    assert a.cells == b.cells and a.replicates == b.replicates


def test_grid_errors():
    with pytest.raises(ValueError):
        SweepGrid(BASE, {"colour": [1]})
    with pytest.raises(ValueError):
        SweepGrid(BASE, {"p_feedback": []})
    assert SweepGrid(BASE, {"p_feedback": [0.2, 1.5]}).violations() == ["cell[1].p_feedback: must lie in [0, 1], got 1.5"]


def test_clustering_non_increasing_in_feedback():
    base = WorldConfig(bias_update_start=None, noise_sigma=0.1)
    res = run_sweep(SweepGrid(base, {"p_feedback": [0.0, 0.5, 1.0]}, replications=5, seed=2))
    c = [row["clustering"] for row in res.cells]
    assert c[0] >= c[1] >= c[2]


def test_advice_benefit_with_accurate_independent_partners():
    base = WorldConfig(p_feedback=1.0, pop1_bias_range=(0.5, 0.5), pop2_bias_range=(0.5, 0.5),
                       noise_sigma=0.5, bias_update_start=None, iterations=300)
    res = run_sweep(SweepGrid(base, {}, replications=5, seed=4))
    assert res.cells[0]["advice_benefit"] > 0


def test_series_kept_on_request():
    res = run_sweep(SweepGrid(BASE, {"p_feedback": [0.0]}, replications=2), keep_series=True)
    assert set(res.series) == {(0, 0), (0, 1)}
    assert len(res.series[(0, 1)]["clustering"]) == BASE.iterations
