"""Time one world run with each available kernel.

    python3 benchmarks/bench_abm.py --agents 20 --iterations 1000 --repeat 3
"""

import argparse
import timeit

import numpy as np

from trustlab.abm import backend
from trustlab.abm.world import WorldConfig, make_draws, run_world_draws, world_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=20)
    ap.add_argument("--iterations", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = WorldConfig(n_agents=args.agents, iterations=args.iterations, partner_selection="trust_proportional",
                      bias_update_start=args.iterations // 2)
    draws = make_draws(cfg, world_rng(args.seed))
    results, times = {}, {}
    for name in backend.AVAILABLE:
        results[name] = run_world_draws(cfg, draws, backend=name)
        times[name] = min(timeit.repeat(lambda: run_world_draws(cfg, draws, backend=name), number=1, repeat=args.repeat))
        print(f"{name:>7}: {times[name] * 1e3:9.2f} ms per run ({args.agents} agents, {args.iterations} iterations)")
    if "cython" in times:
        same = np.array_equal(results["cython"].final_trust, results["python"].final_trust)
        print(f"speedup: {times['python'] / times['cython']:.1f}x, identical output: {same}")


if __name__ == "__main__":
    main()
