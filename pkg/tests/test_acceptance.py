"""Acceptance criteria 1-9, each checked at its stated tolerance.

Every test records one PASS/FAIL line (shown in the pytest terminal summary
under "acceptance criteria") before asserting.
"""

import math
import os
import time

import numpy as np
import pytest

from fprate.batch import BatchConfig, run_batch, substream, uniform_profile, write_batch_summary
from fprate.fpsim import Status, simulate_fp
from fprate.game import validate_game
from fprate.errors import NotPotentialGame
from fprate.potential import common_interest, cycle_violation, extract_potential, param_dim, sample_potential_game
from fprate.rate import rate_certificate

from oracles import euler_fp_bimatrix

SHAPES = [(2, 2), (2, 3), (3, 2), (3, 3), (2, 2, 2)]
SEED = 2026


def record(log, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    log.append(line)
    print(line)
    return ok


@pytest.fixture(scope="session")
def batch():
    config = BatchConfig(shapes=SHAPES, n_games=100, n_inits=20, seed=SEED, horizon=50.0, lock_samples=1000)
    start = time.perf_counter()
    results = run_batch(config, workers=os.cpu_count() or 1)
    elapsed = time.perf_counter() - start
    return write_batch_summary(results, config), elapsed


def test_criterion_1_fixtures(acceptance_log):
    pg = common_interest(np.eye(2))
    start = time.perf_counter()
    a = simulate_fp(pg, [0.2, 0.3])
    b = simulate_fp(pg, [0.4, 0.7])
    c = simulate_fp(pg, [0.4, 0.6])
    cert_a = rate_certificate(a, pg)
    elapsed = time.perf_counter() - start
    checks = {
        "a converged to (0,0)": a.status is Status.CONVERGED and np.array_equal(a.limit, [0, 0]),
        "a tau=0": abs(cert_a.tau) <= 1e-9,
        "a c=sqrt(0.13)": abs(cert_a.c - math.sqrt(0.13)) <= 1e-9,
        "b one switch at ln(6/5)": len(b.events) == 1 and abs(b.events[0].time - math.log(1.2)) <= 1e-9,
        "b converged to (1,1)": b.status is Status.CONVERGED and np.array_equal(b.limit, [1, 1]),
        "c mixed stop": c.status is Status.MIXED_EQUILIBRIUM,
        "c at (0.5,0.5)": c.limit is not None and np.max(np.abs(c.limit - 0.5)) <= 1e-9,
        "c at ln(6/5)": abs(c.end_time - math.log(1.2)) <= 1e-9,
        "runtime < 1 s": elapsed < 1.0,
    }
    failed = [k for k, v in checks.items() if not v]
    ok = record(acceptance_log, 1, not failed, f"fixtures exact, runtime {elapsed:.3f}s" if not failed else f"failed: {failed}")
    assert ok, failed


def test_criterion_2_rate_bound(batch, acceptance_log):
    summary, elapsed = batch
    n_conv = summary["status_counts"]["Converged"]
    ok = (
        summary["bound_failures"] == 0
        and summary["max_post_lock_error"] is not None
        and summary["max_post_lock_error"] <= 1e-12
        and elapsed < 120.0
    )
    detail = (
        f"{n_conv} certificates, {summary['bound_failures']} bound failures (tol 1e-9), "
        f"worst slack {summary['max_worst_slack']:.2e}, post-lock error {summary['max_post_lock_error']:.2e}, "
        f"batch runtime {elapsed:.1f}s"
    )
    record(acceptance_log, 2, ok, detail)
    assert ok, detail


def test_criterion_3_convergence(batch, acceptance_log):
    summary, _ = batch
    counts = summary["status_counts"]
    n_pure = sum(r["status"] == "Converged" and r["converged_pure"] for r in summary["runs"])
    ok = summary["n_runs"] == 2000 and n_pure == 2000 and counts["MixedEquilibriumReached"] == 0 and counts["HorizonReached"] == 0
    detail = f"{n_pure}/{summary['n_runs']} runs converged to a pure NE; status counts {counts}"
    record(acceptance_log, 3, ok, detail)
    assert ok, detail


def test_criterion_4_regularity(batch, acceptance_log):
    summary, _ = batch
    n_regular = sum(g["regular"] for g in summary["games"])
    ok = summary["n_games"] == 100 and n_regular == 100
    detail = f"{n_regular}/{summary['n_games']} games regular"
    record(acceptance_log, 4, ok, detail)
    assert ok, detail


def test_criterion_5_local_lock(batch, acceptance_log):
    summary, _ = batch
    locks = summary["locks"]
    ok = locks["n"] > 0 and locks["n_ok"] == locks["n"] and locks["min_margin"] > 0
    detail = f"{locks['n_ok']}/{locks['n']} strict pure NE locked, min margin {locks['min_margin']:.3e}"
    record(acceptance_log, 5, ok, detail)
    assert ok, detail


def _euler_agreement(shape, n_games, rng_name):
    rng = substream(SEED, rng_name)
    games = [sample_potential_game(shape, rng) for _ in range(n_games)]
    x0 = np.array([uniform_profile(shape, rng) for _ in range(n_games)])
    k1 = shape[0] - 1
    A = np.array([pg.game.utilities[0] for pg in games])
    B = np.array([pg.game.utilities[1] for pg in games])
    times, euler = euler_fp_bimatrix(A, B, x0[:, :k1], x0[:, k1:], h=1e-4, T=10.0, keep_every=10)
    worst = 0.0
    for g, pg in enumerate(games):
        traj = simulate_fp(pg, x0[g], horizon=50.0)
        exact = traj.state(times)
        worst = max(worst, float(np.max(np.abs(exact - euler[:, g, :]))))
    return worst


def test_criterion_6_euler_oracle(acceptance_log):
    shapes = [(2, 2), (2, 3), (3, 2), (3, 3)]
    per_shape = [13, 13, 12, 12]
    worst = max(_euler_agreement(s, n, f"euler-{s[0]}{s[1]}") for s, n in zip(shapes, per_shape))
    ok = worst <= 1e-3
    detail = f"50 two-player games, sup-norm gap to Euler (h=1e-4) over [0,10] = {worst:.2e}"
    record(acceptance_log, 6, ok, detail)
    assert ok, detail


def test_criterion_7_potential_machinery(acceptance_log):
    worst = 0.0
    for g in range(100):
        pg = sample_potential_game(SHAPES[g % len(SHAPES)], substream(SEED, "roundtrip", g))
        diff = extract_potential(pg.game).potential - pg.potential
        worst = max(worst, float(np.max(np.abs(diff - diff.flat[0]))))
    pennies = validate_game({"actions": [2, 2], "utilities": [[1, -1, -1, 1], [-1, 1, 1, -1]]})
    try:
        extract_potential(pennies)
        rejected = False
    except NotPotentialGame:
        rejected = True
    cyc = cycle_violation(pennies)
    dims = [param_dim((2, 2)), param_dim((3, 3)), param_dim((2, 2, 2))]
    ok = worst <= 1e-10 and rejected and cyc > 0 and dims == [9, 16, 22]
    detail = f"round-trip deviation {worst:.1e}, pennies rejected={rejected} cycle={cyc:g}, param_dim={dims}"
    record(acceptance_log, 7, ok, detail)
    assert ok, detail


def test_criterion_8_ascent(batch, acceptance_log):
    summary, _ = batch
    ok = summary["min_ascent"] >= -1e-10
    detail = f"smallest potential increment over all sampled segments {summary['min_ascent']:.2e}"
    record(acceptance_log, 8, ok, detail)
    assert ok, detail


def test_criterion_9_rate_fit(batch, acceptance_log):
    summary, _ = batch
    n_conv = summary["status_counts"]["Converged"]
    dev = summary["max_rate_deviation"]
    ok = n_conv > 0 and summary["missing_rate_fits"] == 0 and dev is not None and dev <= 1e-6
    detail = f"{n_conv - summary['missing_rate_fits']}/{n_conv} fits, max |lambda - 1| = {dev:.2e}"
    record(acceptance_log, 9, ok, detail)
    assert ok, detail
