"""Walk through the 2x2 coordination game from three starting points.

Prints the events, limit and rate certificate of each run and writes a
trajectory CSV per run for plotting.
"""

import argparse
from pathlib import Path

import numpy as np

from fprate import enumerate_nash, rate_certificate, simulate_fp
from fprate.errors import NotConverged
from fprate.io import write_trajectory_csv
from fprate.potential import common_interest

STARTS = {"converge": (0.2, 0.3), "switch": (0.4, 0.7), "mixed": (0.4, 0.6)}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=None, help="directory for trajectory CSVs")
    p.add_argument("--horizon", type=float, default=8.0)
    args = p.parse_args()

    pg = common_interest(np.eye(2))
    equilibria = enumerate_nash(pg)
    print("equilibria:", [e.profile.tolist() for e in equilibria])
    for name, x0 in STARTS.items():
        traj = simulate_fp(pg, x0, args.horizon)
        print(f"\n[{name}] x0={x0} status={traj.status.value} end={traj.end_time:.6f}")
        for ev in traj.events:
            print("  event", ev.to_dict())
        try:
            cert = rate_certificate(traj, pg)
            print(f"  limit={traj.limit.tolist()} tau={cert.tau:.12f} c={cert.c:.12f}")
        except NotConverged:
            print(f"  stopped at {traj.limit.tolist()}; no certificate")
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            write_trajectory_csv(args.out / f"{name}.csv", traj, pg, equilibria)


if __name__ == "__main__":
    main()
