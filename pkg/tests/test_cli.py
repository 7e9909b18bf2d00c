import os
from pathlib import Path

import pytest
import yaml

from trustlab.cli import main
from trustlab.config import RunConfig, validate
from trustlab.io import read_csv

SMALL_EXP = ["--sessions", "2", "--blocks", "2"]


def files(d: Path):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.suffix == ".csv"}


def test_exp1_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["exp1", "--seed", "42", "--feedback", "--out", str(a), *SMALL_EXP]) == 0
    assert main(["exp1", "--seed", "42", "--feedback", "--out", str(b), *SMALL_EXP]) == 0
    assert files(a) == files(b) and set(files(a)) == {"trials.csv", "summary.csv"}
    c = tmp_path / "c"
    main(["exp1", "--seed", "43", "--feedback", "--out", str(c), *SMALL_EXP])
    assert files(c) != files(a)


def test_trials_schema(tmp_path):
    assert main(["exp2", "--seed", "1", "--out", str(tmp_path), *SMALL_EXP]) == 0
    rows = read_csv(tmp_path / "trials.csv")
    for col in ("session", "trial", "advisor", "truth", "pre_side", "pre_step", "agrees", "advisor_confident",
                "post_side", "post_step", "feedback", "theta_acc", "theta_cons", "theta_conf"):
        assert col in rows[0]
    text = (tmp_path / "trials.csv").read_bytes()
    assert b"\r\n" not in text


def test_manifest_round_trip(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["exp3", "--seed", "5", "--out", str(a), *SMALL_EXP]) == 0
    manifest = yaml.safe_load((a / "manifest.yaml").read_text())
    assert manifest["seed"] == 5 and manifest["command"] == "exp3"
    assert main(["exp3", "--config", str(a / "manifest.yaml"), "--out", str(b)]) == 0
    assert files(a) == files(b)


def test_analytics_table(tmp_path):
    assert main(["analytics", "--experiment", "1", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "analytics.csv")
    assert [r["advisor"] for r in rows] == ["acc_cal", "acc_uncal", "inacc_cal", "inacc_uncal"]
    assert float(rows[0]["mean_abs_ig"]) == pytest.approx(0.29, abs=0.005)


def test_abm_feedback_run(tmp_path):
    assert main(["abm", "--p-feedback", "1.0", "--n-agents", "20", "--seed", "3", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "series.csv")
    assert len(rows) == 1000
    assert float(rows[-1]["clustering"]) == pytest.approx(0.5, abs=0.05)


def test_sweep_thread_counts(tmp_path):
    args = ["sweep", "--p-feedback", "0,1", "--iterations", "100", "--bias-update-start", "50",
            "--replications", "2", "--seed", "8"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*args, "--workers", "1", "--out", str(a)]) == 0
    assert main([*args, "--workers", "2", "--out", str(b)]) == 0
    assert files(a) == files(b)
    assert len(read_csv(a / "sweep.csv")) == 2


def test_exit_codes(tmp_path):
    assert main(["abm", "--p-feedback", "1.2", "--out", str(tmp_path / "x")]) == 3
    assert main(["exp3", "--scale-steps", "5", "--out", str(tmp_path / "y")]) == 3
    assert main(["exp1", "--config", str(tmp_path / "missing.yaml")]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("sessions: [1, 2\n")
    assert main(["exp1", "--config", str(bad)]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["analytics", "--out", str(blocker / "sub")]) == 4
    # a list value outside a sweep is an invariant violation
    assert main(["abm", "--p-feedback", "0,1", "--out", str(tmp_path / "z")]) == 3


def test_validate_examples():
    assert validate(RunConfig()) == []
    v = validate(RunConfig(command="abm", world={"p_feedback": 1.2}))
    assert len(v) == 1 and "world.p_feedback" in v[0]
    v = validate(RunConfig(command="exp3", scale_steps=5))
    assert any("scale_steps" in x for x in v)


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TRUSTLAB_SEED", "77")
    assert main(["analytics", "--out", str(tmp_path)]) == 0
    assert yaml.safe_load((tmp_path / "manifest.yaml").read_text())["seed"] == 77


def test_writes_only_into_out(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["exp2", "--out", "run", *SMALL_EXP]) == 0
    assert sorted(os.listdir(tmp_path)) == ["run"]
    assert sorted(os.listdir(tmp_path / "run")) == ["manifest.yaml", "summary.csv", "trials.csv"]
