"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 verification failure (no exact
potential, bound violated, run did not converge to a certificate).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from fprate.batch import BatchConfig, run_batch, substream, write_batch_summary
from fprate.config import Tolerances
from fprate.equilibria import enumerate_nash
from fprate.errors import GameError, NotConverged, NotPotentialGame
from fprate.fpsim import simulate_fp
from fprate.io import (
    dump_json,
    game_to_dict,
    load_potential_game,
    read_game,
    trajectory_summary,
    write_trajectory_csv,
)
from fprate.potential import check_exact_potential, cycle_violation, extract_potential, sample_potential_game
from fprate.rate import rate_certificate, verify_bound

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


def _counts(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _shapes(text: str) -> list[tuple[int, ...]]:
    return [_counts(part) for part in text.replace("/", ";").split(";") if part.strip()]


def _floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fprate", description="Fictitious play in potential games: simulation and rate certificates")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample random potential games to JSON files")
    gen.add_argument("--actions", type=_counts, required=True, help="action counts, e.g. 2,3")
    gen.add_argument("--n", type=int, default=1)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", type=Path, default=Path("."))

    chk = sub.add_parser("potential-check", help="verify the stored potential or extract one")
    chk.add_argument("--game", type=Path, required=True)
    chk.add_argument("--tol", type=float, default=None)
    chk.add_argument("--out", type=Path, default=None, help="write the game with its potential here")

    eq = sub.add_parser("equilibria", help="enumerate and classify Nash equilibria")
    eq.add_argument("--game", type=Path, required=True)
    eq.add_argument("--tol", type=float, default=None)
    eq.add_argument("--out", type=Path, default=None)

    for name, helptext in (("simulate", "exact fictitious-play trajectory"), ("rate", "rate certificate for one run")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--game", type=Path, required=True)
        s.add_argument("--x0", type=_floats, required=True, help="flat X coordinates, e.g. 0.4,0.7")
        s.add_argument("--horizon", type=float, default=50.0)
        s.add_argument("--tol", type=float, default=None)
        s.add_argument("--metric", choices=("euclidean", "sup"), default="euclidean")
        s.add_argument("--out", type=Path, default=None)

    b = sub.add_parser("batch", help="statistical experiment over sampled games and initial conditions")
    b.add_argument("--actions", type=_shapes, required=True, help="one or more shapes separated by ';', e.g. '2,2;3,3;2,2,2'")
    b.add_argument("--n", type=int, default=100)
    b.add_argument("--n-inits", type=int, default=20)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--horizon", type=float, default=50.0)
    b.add_argument("--tol", type=float, default=None)
    b.add_argument("--metric", choices=("euclidean", "sup"), default="euclidean")
    b.add_argument("--lock-samples", type=int, default=1000)
    b.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    b.add_argument("--out", type=Path, default=Path("."))
    return p


def _emit(obj, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(dump_json(obj))
    else:
        dump_json(obj, out)


def cmd_gen(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    for g in range(args.n):
        pg = sample_potential_game(args.actions, substream(args.seed, "games", g))
        path = args.out / f"game_{g:03d}.json"
        dump_json(game_to_dict(pg), path)
        print(path)
    return EXIT_OK


def cmd_potential_check(args) -> int:
    game, stored = read_game(args.game)
    tol = Tolerances().potential if args.tol is None else args.tol
    report = {"cycle_violation": cycle_violation(game)}
    if stored is not None:
        report.update(check_exact_potential(game, stored, tol), source="stored")
        _emit(report, None)
        return EXIT_OK if report["ok"] else EXIT_VERIFY
    try:
        pg = extract_potential(game, tol)
    except NotPotentialGame as exc:
        report.update(ok=False, max_violation=exc.max_violation, source="extracted")
        _emit(report, None)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    report.update(check_exact_potential(game, pg.potential, tol), source="extracted")
    report["potential"] = [float(v) for v in pg.potential.ravel()]
    if args.out is not None:
        dump_json(game_to_dict(pg), args.out)
    _emit(report, None)
    return EXIT_OK


def cmd_equilibria(args) -> int:
    pg = load_potential_game(args.game)
    tol = Tolerances()
    nash_tol = tol.nash if args.tol is None else args.tol
    records = enumerate_nash(pg, nash_tol, tol)
    _emit([r.to_dict(pg.game) for r in records], args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    pg = load_potential_game(args.game)
    traj = simulate_fp(pg, args.x0, args.horizon)
    equilibria = enumerate_nash(pg)
    if args.out is None:
        write_trajectory_csv(sys.stdout, traj, pg, equilibria, metric=args.metric)
        return EXIT_OK
    args.out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(args.out / "trajectory.csv", traj, pg, equilibria, metric=args.metric)
    summary = trajectory_summary(traj)
    dump_json(summary, args.out / "events.json")
    _emit({k: summary[k] for k in ("status", "end_time", "limit", "n_segments", "events")}, None)
    return EXIT_OK


def cmd_rate(args) -> int:
    pg = load_potential_game(args.game)
    traj = simulate_fp(pg, args.x0, args.horizon)
    try:
        cert = rate_certificate(traj, pg, args.metric)
    except NotConverged as exc:
        _emit({"status": traj.status.value, "certificate": None, "end_time": traj.end_time}, args.out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    check = verify_bound(traj, cert, enumerate_nash(pg), tol=1e-9 if args.tol is None else args.tol)
    out = cert.to_dict(traj.status.value)
    out["verified"] = check["ok"]
    out["worst_slack"] = check["worst_slack"]
    _emit(out, args.out)
    return EXIT_OK if check["ok"] else EXIT_VERIFY


def cmd_batch(args) -> int:
    tol = Tolerances() if args.tol is None else Tolerances().updated(nash=args.tol, tie=args.tol)
    config = BatchConfig(
        shapes=args.actions,
        n_games=args.n,
        n_inits=args.n_inits,
        seed=args.seed,
        horizon=args.horizon,
        metric=args.metric,
        lock_samples=args.lock_samples,
        tolerances=tol,
    )
    summary = write_batch_summary(run_batch(config, args.workers), config)
    args.out.mkdir(parents=True, exist_ok=True)
    dump_json(summary, args.out / "summary.json")
    brief = {k: summary[k] for k in ("n_games", "n_runs", "status_counts", "fraction_regular", "fraction_pure", "bound_failures")}
    _emit(brief, None)
    return EXIT_VERIFY if summary["bound_failures"] else EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "potential-check": cmd_potential_check,
    "equilibria": cmd_equilibria,
    "simulate": cmd_simulate,
    "rate": cmd_rate,
    "batch": cmd_batch,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except NotPotentialGame as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (GameError, OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
