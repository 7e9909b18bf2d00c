"""Parameter sweeps over world configurations.

Cells are the cartesian product of the axes in the order given.  Each
replicate draws from its own stream keyed by (cell index, replicate), so a
cell's results do not depend on how many workers run or in what order.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .world import WorldConfig, run_world

SUMMARY_KEYS = (
    "clustering",
    "bias_extremity_pop1",
    "bias_extremity_pop2",
    "mean_pA_pop1",
    "mean_pA_pop2",
    "accuracy_pre",
    "accuracy_post",
    "advice_benefit",
    "mean_trust",
    "trust_in_pop2",
)

_CONFIG_FIELDS = {f.name for f in fields(WorldConfig)}


@dataclass
class SweepGrid:
    base: WorldConfig = field(default_factory=WorldConfig)
    axes: Dict[str, Sequence[Any]] = field(default_factory=dict)
    replications: int = 20
    seed: int = 0

    def __post_init__(self):
        unknown = set(self.axes) - _CONFIG_FIELDS
        if unknown:
            raise ValueError(f"unknown sweep axes: {sorted(unknown)}")
        for name, values in self.axes.items():
            if len(values) == 0:
                raise ValueError(f"axis {name!r} is empty")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")

    def cells(self) -> List[Tuple[int, Dict[str, Any], WorldConfig]]:
        names = list(self.axes)
        out = []
        for index, combo in enumerate(itertools.product(*(self.axes[n] for n in names))):
            params = dict(zip(names, combo))
            out.append((index, params, replace(self.base, **params)))
        return out

    def violations(self) -> List[str]:
        problems = []
        for index, _, cfg in self.cells():
            problems += cfg.violations(prefix=f"cell[{index}].")
        return problems


@dataclass
class SweepResult:
    axes: Tuple[str, ...]
    cells: List[Dict[str, Any]]
    replicates: List[Dict[str, Any]]
    series: Dict[Tuple[int, int], Dict[str, np.ndarray]] = field(default_factory=dict)


def _run_replicate(args):
    index, rep, params, cfg, seed, backend, keep_series = args
    res = run_world(cfg, seed, key=(index, rep), backend=backend)
    row = {"cell": index, "replicate": rep, "seed": seed, **params, **res.summary()}
    series = None
    if keep_series:
        series = {
            "clustering": res.clustering,
            "mean_pA_pop1": res.mean_pA_pop1,
            "mean_pA_pop2": res.mean_pA_pop2,
            "accuracy_pre": res.accuracy_pre,
            "accuracy_post": res.accuracy_post,
            "trust_in_pop2": res.trust_in_pop2,
        }
    return row, series


def run_sweep(
    grid: SweepGrid,
    workers: int = 1,
    backend: Optional[str] = None,
    keep_series: bool = False,
) -> SweepResult:
    """Run every (cell, replicate); cell rows average the replicates."""
    cells = grid.cells()
    if not cells:
        raise ValueError("empty sweep grid")
    for _, _, cfg in cells:
        cfg.validate()
    jobs = [
        (index, rep, params, cfg, grid.seed, backend, keep_series)
        for index, params, cfg in cells
        for rep in range(grid.replications)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_replicate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_replicate(j) for j in jobs]
    # map keeps submission order, but sort anyway so the output never depends on scheduling
    results.sort(key=lambda r: (r[0]["cell"], r[0]["replicate"]))
    rep_rows = [r for r, _ in results]
    series = {(r["cell"], r["replicate"]): s for r, s in results if s is not None}

    cell_rows = []
    for index, params, _ in cells:
        rows = [r for r in rep_rows if r["cell"] == index]
        row = {"cell": index, **params, "replications": len(rows), "seed": grid.seed}
        for k in SUMMARY_KEYS:
            vals = np.array([r[k] for r in rows], dtype=float)
            row[k] = float(vals.mean())
            row[f"{k}_sd"] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        cell_rows.append(row)
    return SweepResult(tuple(grid.axes), cell_rows, rep_rows, series)
