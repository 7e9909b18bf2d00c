"""Command-line entry point.

    trustlab exp1 --seed 42 --feedback --out runs/e1
    trustlab analytics --experiment 1
    trustlab abm --p-feedback 1.0 --n-agents 20
    trustlab sweep --p-feedback 0,0.25,0.5,0.75,1 --workers 4

Every command writes CSVs plus ``manifest.yaml`` into ``--out``; passing
that manifest back with ``--config`` reruns the same computation.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from . import advisors as adv
from .abm.sweep import SweepGrid, run_sweep
from .abm.world import run_world
from .config import DEFAULT_SESSIONS, ConfigError, RunConfig, apply_overrides, load, validate
from .core import DegenerateSampleError, TrustlabError
from .infogain import auc_expected_info_gain_exp3, exp1_analytics, exp2_analytics
from .io import write_csv, write_yaml
from .metrics import InsufficientTrialsError, model_correlation
from .sessions import session_summary, simulate_session

log = logging.getLogger("trustlab")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4

VARIANTS = ("acc", "cons", "conf")

TRIAL_COLUMNS = [
    "session", "trial", "advisor", "truth", "pre_side", "pre_step", "agrees",
    "advisor_confident", "post_side", "post_step", "feedback",
    "theta_acc", "theta_cons", "theta_conf",
    # extras beyond the core schema
    "block", "d", "advisor_correct", "theta_own",
    "alpha_acc", "beta_acc", "alpha_cons", "beta_cons", "alpha_conf", "beta_conf", "encounters",
    "model_post_acc", "model_post_cons", "model_post_conf",
]

ANALYTICS_COLUMNS = [
    "experiment", "advisor",
    "ig_confident_disagree", "ig_unconfident_disagree", "ig_unconfident_agree", "ig_confident_agree",
    "ig_agree", "ig_disagree",
    "mean_abs_ig", "ig_e", "auc_ig_e", "type2_auroc", "published_type2_auroc",
    "expected_accuracy", "expected_agreement",
]

SERIES_KEYS = ("clustering", "mean_pA_pop1", "mean_pA_pop2", "accuracy_pre", "accuracy_post", "trust_in_pop2")


# ---------------------------------------------------------------- pipelines


def _trial_rows(logs) -> List[dict]:
    rows = []
    for lg in logs:
        for r in lg.records:
            row = {
                "session": lg.session,
                "trial": r.trial,
                "advisor": r.advisor,
                "truth": r.truth.name,
                "pre_side": r.pre.side.name,
                "pre_step": r.pre.step,
                "agrees": r.advice.agrees,
                "advisor_confident": r.advice.advisor_confident,
                "post_side": r.post.side.name,
                "post_step": r.post.step,
                "feedback": r.feedback,
                "block": r.block,
                "d": r.d,
                "advisor_correct": r.advice.advisor_correct,
                "theta_own": r.theta.get("own"),
            }
            for v in VARIANTS:
                row[f"theta_{v}"] = r.theta.get(v)
                if v in r.evidence:
                    a, b, n = r.evidence[v]
                    row[f"alpha_{v}"], row[f"beta_{v}"], row["encounters"] = a, b, n
                if v in r.model_post:
                    row[f"model_post_{v}"] = r.model_post[v].signed * r.pre.side.sign
            rows.append(row)
    return rows


def _summary_rows(logs, variants) -> List[dict]:
    rows = []
    for lg in logs:
        corr = {}
        for v in variants:
            try:
                corr[v] = model_correlation(lg, v)
            except (InsufficientTrialsError, DegenerateSampleError):
                corr[v] = math.nan
        for row in session_summary(lg):
            row["feedback"] = lg.feedback
            for v in VARIANTS:
                row[f"model_corr_{v}"] = corr.get(v)
            rows.append(row)
    return rows


def run_experiment(cfg: RunConfig, out: Path) -> List[str]:
    scfg = cfg.session_config()
    seed = cfg.resolved_seed()
    n = cfg.sessions or DEFAULT_SESSIONS[scfg.experiment]
    logs = []
    for s in range(n):
        logs.append(simulate_session(scfg, seed, s))
        log.info("session %d/%d done", s + 1, n)
    variants = [v.value for v in scfg.variants]
    write_csv(out / "trials.csv", _trial_rows(logs), TRIAL_COLUMNS)
    write_csv(out / "summary.csv", _summary_rows(logs, variants))
    return ["trials.csv", "summary.csv"]


def analytics_rows(experiment: Optional[int], prior: float = 0.7) -> List[dict]:
    rows = []
    if experiment in (None, 1):
        for name, deck in adv.EXP1_PROFILES.items():
            row = {"experiment": 1, "advisor": name, **exp1_analytics(deck, prior)}
            row["published_type2_auroc"] = adv.EXP1_PUBLISHED_AUROC[name]
            row["expected_accuracy"] = deck.accuracy
            rows.append(row)
    if experiment in (None, 2):
        for name, pol in adv.EXP2_PROFILES.items():
            row = {"experiment": 2, "advisor": name, **exp2_analytics(pol, prior)}
            row["expected_accuracy"], row["expected_agreement"] = pol.expected_rates(prior)
            rows.append(row)
    if experiment in (None, 3):
        for name, pol in adv.EXP3_PROFILES.items():
            a = pol.p_agree_given_correct_by_bin
            # bins hold 30/40/30% of trials
            agree_correct = 0.3 * a[0] + 0.4 * a[1] + 0.3 * a[2]
            b = pol.p_agree_given_incorrect
            rows.append({
                "experiment": 3,
                "advisor": name,
                "auc_ig_e": auc_expected_info_gain_exp3(pol),
                "expected_accuracy": prior * agree_correct + (1 - prior) * (1 - b),
                "expected_agreement": prior * agree_correct + (1 - prior) * b,
            })
    return rows


def run_analytics(cfg: RunConfig, out: Path) -> List[str]:
    write_csv(out / "analytics.csv", analytics_rows(cfg.experiment, cfg.prior), ANALYTICS_COLUMNS)
    return ["analytics.csv"]


def run_abm(cfg: RunConfig, out: Path) -> List[str]:
    world = cfg.world_config()
    res = run_world(world, cfg.resolved_seed())
    series = [
        {"iteration": t + 1, **{k: float(getattr(res, k)[t]) for k in SERIES_KEYS}}
        for t in range(world.iterations)
    ]
    write_csv(out / "series.csv", series)
    write_csv(out / "summary.csv", [res.summary()])
    n = world.n_agents
    trust = [
        {"from": i, "to": j, "group_from": int(res.groups[i]), "group_to": int(res.groups[j]),
         "theta": float(res.final_trust[i, j])}
        for i in range(n) for j in range(n) if i != j
    ]
    write_csv(out / "trust.csv", trust)
    return ["series.csv", "summary.csv", "trust.csv"]


def run_sweep_cmd(cfg: RunConfig, out: Path) -> List[str]:
    grid = SweepGrid(cfg.world_config(), dict(cfg.axes), cfg.replications, cfg.resolved_seed())
    res = run_sweep(grid, workers=cfg.workers, keep_series=cfg.series)
    write_csv(out / "sweep.csv", res.cells)
    write_csv(out / "replicates.csv", res.replicates)
    files = ["sweep.csv", "replicates.csv"]
    if cfg.series:
        rows = []
        for (cell, rep), s in sorted(res.series.items()):
            for t in range(len(s["clustering"])):
                rows.append({"cell": cell, "replicate": rep, "iteration": t + 1,
                             **{k: float(s[k][t]) for k in SERIES_KEYS}})
        write_csv(out / "series.csv", rows)
        files.append("series.csv")
    return files


PIPELINES = {
    "exp1": run_experiment,
    "exp2": run_experiment,
    "exp3": run_experiment,
    "analytics": run_analytics,
    "abm": run_abm,
    "sweep": run_sweep_cmd,
}


def run(cfg: RunConfig) -> int:
    problems = validate(cfg)
    if problems:
        for p in problems:
            print(f"invalid configuration: {p}", file=sys.stderr)
        return EXIT_INVARIANT
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = PIPELINES[cfg.command](cfg, out)
        manifest = {
            "artifact": "trustlab",
            "version": __version__,
            "command": cfg.command,
            "seed": cfg.resolved_seed(),
            "outputs": files,
            "config": {**cfg.to_dict(), "seed": cfg.resolved_seed()},
        }
        write_yaml(out / "manifest.yaml", manifest)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TrustlabError, ValueError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


# ---------------------------------------------------------------- arguments


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trustlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"trustlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (falls back to $TRUSTLAB_SEED, then 0)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--config", type=Path, help="YAML config or a previous manifest.yaml")
    common.add_argument("-v", "--verbose", action="store_true", help="log one line per session")

    exp = argparse.ArgumentParser(add_help=False)
    exp.add_argument("--feedback", action=argparse.BooleanOptionalAction, default=None)
    exp.add_argument("--variants", help="comma list of acc,cons,conf")
    exp.add_argument("--sessions", type=int)
    exp.add_argument("--blocks", type=int)
    exp.add_argument("--trials-per-block", type=int)
    exp.add_argument("--practice-trials", type=int)
    exp.add_argument("--scale-steps", type=int)

    world = argparse.ArgumentParser(add_help=False)
    world.add_argument("--signal", type=_floats, help="signal strength S (comma list for sweeps)")
    world.add_argument("--noise", type=_floats, help="perceptual noise sigma (comma list for sweeps)")
    world.add_argument("--pop2-noise", type=_floats, help="noise of the second population")
    world.add_argument("--p-feedback", type=_floats, help="feedback probability (comma list for sweeps)")
    world.add_argument("--n-agents", type=int)
    world.add_argument("--iterations", type=int)
    world.add_argument("--learning-rate", type=float)
    world.add_argument("--partner-selection", choices=("random", "trust_proportional"))
    world.add_argument("--discounting", action=argparse.BooleanOptionalAction, default=None)
    world.add_argument("--bias-update", action=argparse.BooleanOptionalAction, default=None)
    world.add_argument("--bias-update-start", type=int)
    world.add_argument("--feedback-estimate", choices=("agreement", "agreement_in_confidence"))
    world.add_argument("--bias-indicator", choices=("discrete", "continuous"))

    for name in ("exp1", "exp2", "exp3"):
        sub.add_parser(name, parents=[common, exp], help=f"simulate experiment {name[-1]} sessions")
    an = sub.add_parser("analytics", parents=[common], help="information gain and AUROC tables")
    an.add_argument("--experiment", type=int, choices=(1, 2, 3))
    an.add_argument("--prior", type=float)
    sub.add_parser("abm", parents=[common, world], help="run one agent-based world")
    sw = sub.add_parser("sweep", parents=[common, world], help="parameter sweep over worlds")
    sw.add_argument("--replications", type=int)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--series", action="store_true", default=None, help="also write per-iteration series")
    return parser


_WORLD_LISTS = {"signal": "signal_strength", "noise": "noise_sigma", "pop2_noise": "pop2_noise_sigma",
                "p_feedback": "p_feedback"}
_WORLD_SCALARS = ("n_agents", "iterations", "learning_rate", "partner_selection", "discounting",
                  "feedback_estimate", "bias_indicator")


def overrides_from_args(args: argparse.Namespace) -> Dict[str, object]:
    o: Dict[str, object] = {}
    a = vars(args)
    for key in ("seed", "out", "feedback", "sessions", "blocks", "trials_per_block", "practice_trials",
                "scale_steps", "experiment", "prior", "replications", "workers", "series"):
        if a.get(key) is not None:
            o[key] = a[key]
    if a.get("variants"):
        o["variants"] = tuple(v.strip() for v in a["variants"].split(",") if v.strip())
    for flag, field in _WORLD_LISTS.items():
        values = a.get(flag)
        if values is None:
            continue
        if len(values) == 1:
            o[f"world.{field}"] = values[0]
        elif args.command == "sweep":
            o[f"axes.{field}"] = values
        else:
            o[f"world.{field}"] = values  # rejected by validation
    for field in _WORLD_SCALARS:
        if a.get(field) is not None:
            o[f"world.{field}"] = a[field]
    if a.get("bias_update") is False:
        o["world.bias_update_start"] = None
    elif a.get("bias_update_start") is not None:
        o["world.bias_update_start"] = a["bias_update_start"]
    return o


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load(args.config) if args.config else RunConfig()
        cfg = apply_overrides(cfg, overrides_from_args(args))
        cfg.command = args.command
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
