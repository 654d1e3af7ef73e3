"""Statistical experiment over random potential games.

Samples games of the given shapes, runs fictitious play from uniform initial
conditions and reports convergence, regularity, lock and rate statistics.

    python scripts/batch_experiment.py --games 100 --inits 20 --seed 2026 --out results/
"""

import argparse
import json
import os
import time
from pathlib import Path

from fprate.batch import BatchConfig, run_batch, write_batch_summary
from fprate.io import dump_json

DEFAULT_SHAPES = "2,2;2,3;3,2;3,3;2,2,2"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--shapes", default=DEFAULT_SHAPES)
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--inits", type=int, default=20)
    p.add_argument("--seed", type=int, default=2026)
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()

    shapes = [tuple(int(v) for v in s.split(",")) for s in args.shapes.split(";")]
    config = BatchConfig(shapes=shapes, n_games=args.games, n_inits=args.inits, seed=args.seed, horizon=args.horizon)
    start = time.perf_counter()
    summary = write_batch_summary(run_batch(config, args.workers), config)
    elapsed = time.perf_counter() - start

    args.out.mkdir(parents=True, exist_ok=True)
    dump_json(summary, args.out / "summary.json")
    keys = ["n_games", "n_runs", "status_counts", "fraction_regular", "fraction_pure", "tau_quantiles",
            "c_quantiles", "bound_failures", "max_worst_slack", "max_post_lock_error", "max_rate_deviation",
            "min_ascent", "locks"]
    print(json.dumps({k: summary[k] for k in keys}, indent=2))
    print(f"elapsed {elapsed:.1f}s, full summary in {args.out / 'summary.json'}")


if __name__ == "__main__":
    main()
