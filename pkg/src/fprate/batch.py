"""Seeded batch experiments over random potential games and initial conditions.

For each sampled game the harness enumerates and classifies equilibria,
checks the local best-response lock around each strict pure equilibrium,
runs fictitious play from uniform initial conditions and certifies the
exponential rate of every converged run.

All randomness derives from one integer seed through named substreams, so a
batch is reproducible regardless of worker count.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from fprate.config import Tolerances
from fprate.equilibria import _batch_payoffs, enumerate_nash, is_regular_game, lock_radius
from fprate.fpsim import Status, simulate_fp
from fprate.io import potential_along
from fprate.potential import sample_potential_game
from fprate.rate import fit_decay, post_lock_decay_error, rate_certificate, verify_bound


def substream(seed: int, name: str, *index: int) -> np.random.Generator:
    """Independent generator for a named purpose and index under one seed."""
    return np.random.default_rng([seed, zlib.crc32(name.encode()), *index])


def uniform_profile(actions, rng) -> np.ndarray:
    """Uniform draw from X: each player's weights are flat-Dirichlet."""
    return np.concatenate([rng.dirichlet(np.ones(k))[1:] for k in actions])


@dataclass
class BatchConfig:
    shapes: list[tuple[int, ...]]
    n_games: int = 100
    n_inits: int = 20
    seed: int = 0
    horizon: float = 50.0
    metric: str = "euclidean"
    lock_samples: int = 1000
    tolerances: Tolerances = field(default_factory=Tolerances)

    def shape_for(self, g: int) -> tuple[int, ...]:
        # shapes are cycled so every listed shape is covered
        return tuple(self.shapes[g % len(self.shapes)])


def ascent_check(pg, traj, per_segment: int = 200) -> float:
    """Smallest change in potential between consecutive samples of a segment.

    Also folds in the instantaneous rate ``sum_i U(b_i, x_-i) - U(x)``. Both
    are nonnegative along exact fictitious play in a potential game.
    """
    worst = math.inf
    game = pg.game
    for seg in traj.segments:
        t = np.linspace(seg.t_start, seg.t_end, per_segment + 2)
        xs = seg.state(t)
        u = potential_along(pg, xs)
        worst = min(worst, float(np.diff(u).min()))
        sig = []
        for i in range(game.n_players):
            blk = xs[:, game.offsets[i] : game.offsets[i + 1]]
            sig.append(np.column_stack([1.0 - blk.sum(axis=1), blk]))
        rate = np.zeros(t.size)
        for i, a in enumerate(seg.actions):
            p = _batch_payoffs(pg.potential, sig, i)
            rate += p[:, a] - np.einsum("nk,nk->n", p, sig[i])
        worst = min(worst, float(rate.min()))
    return worst


def run_game(config: BatchConfig, g: int) -> dict:
    tol = config.tolerances
    shape = config.shape_for(g)
    pg = sample_potential_game(shape, substream(config.seed, "games", g))
    equilibria = enumerate_nash(pg, tol.nash, tol)
    result = {
        "game": g,
        "shape": list(shape),
        "n_equilibria": len(equilibria),
        "n_pure": sum(e.is_pure for e in equilibria),
        "regular": is_regular_game(equilibria),
        "locks": [],
        "runs": [],
    }
    lock_rng = substream(config.seed, "neighborhood", g)
    for e in equilibria:
        if e.strict:
            res = lock_radius(pg, e.profile, config.lock_samples, lock_rng)
            result["locks"].append({"ok": res["ok"], "radius": res["radius"], "min_margin": res["min_margin"]})
    init_rng = substream(config.seed, "inits", g)
    pure = [e.profile for e in equilibria if e.is_pure]
    for r in range(config.n_inits):
        x0 = uniform_profile(shape, init_rng)
        traj = simulate_fp(pg, x0, config.horizon, tol)
        run = {
            "init": r,
            "status": traj.status.value,
            "n_events": len(traj.events),
            "ascent_min": ascent_check(pg, traj),
            "converged_pure": False,
        }
        if traj.status is Status.CONVERGED:
            cert = rate_certificate(traj, pg, config.metric)
            bound = verify_bound(traj, cert, equilibria, tol=1e-9)
            fit = fit_decay(traj, cert.tau, metric=config.metric)
            run.update(
                converged_pure=any(np.array_equal(cert.x_star, p) for p in pure),
                tau=cert.tau,
                c=cert.c,
                bound_ok=bound["ok"],
                worst_slack=bound["worst_slack"],
                post_lock_error=post_lock_decay_error(traj, cert),
                decay_rate=None if fit is None else fit["lambda"],
                decay_r2=None if fit is None else fit["r_squared"],
            )
        result["runs"].append(run)
    return result


def _run_game_star(args):
    return run_game(*args)


def run_batch(config: BatchConfig, workers: int = 1) -> list[dict]:
    jobs = [(config, g) for g in range(config.n_games)]
    if workers <= 1:
        return [run_game(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_game_star, jobs))


def _quantiles(values) -> dict | None:
    if not values:
        return None
    q = np.quantile(np.asarray(values, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
    return {k: float(v) for k, v in zip(("min", "q25", "median", "q75", "max"), q)}


def write_batch_summary(results: list[dict], config: BatchConfig | None = None) -> dict:
    """Aggregate per-game results into a JSON-ready summary."""
    runs = [dict(run, game=res["game"]) for res in results for run in res["runs"]]
    converged = [r for r in runs if r["status"] == Status.CONVERGED.value]
    locks = [lk for res in results for lk in res["locks"]]
    status_counts = {s.value: sum(r["status"] == s.value for r in runs) for s in Status}
    rates = [r["decay_rate"] for r in converged if r.get("decay_rate") is not None]
    summary = {
        "n_games": len(results),
        "n_runs": len(runs),
        "status_counts": status_counts,
        "fraction_regular": (sum(res["regular"] for res in results) / len(results)) if results else 0.0,
        "fraction_pure": (sum(r["converged_pure"] for r in runs) / len(runs)) if runs else 0.0,
        "tau_quantiles": _quantiles([r["tau"] for r in converged]),
        "c_quantiles": _quantiles([r["c"] for r in converged]),
        "bound_failures": sum(not r["bound_ok"] for r in converged),
        "max_worst_slack": max((r["worst_slack"] for r in converged), default=None),
        "max_post_lock_error": max((r["post_lock_error"] for r in converged), default=None),
        "max_rate_deviation": max((abs(v - 1.0) for v in rates), default=None),
        "missing_rate_fits": len(converged) - len(rates),
        "min_ascent": min((r["ascent_min"] for r in runs), default=None),
        "locks": {
            "n": len(locks),
            "n_ok": sum(lk["ok"] for lk in locks),
            "min_margin": min((lk["min_margin"] for lk in locks), default=None),
        },
        "games": [{k: v for k, v in res.items() if k != "runs"} for res in results],
        "runs": runs,
    }
    if config is not None:
        cfg = asdict(config)
        cfg["shapes"] = [list(s) for s in config.shapes]
        summary["config"] = cfg
    return summary


__all__ = [
    "BatchConfig",
    "run_batch",
    "run_game",
    "substream",
    "uniform_profile",
    "write_batch_summary",
]
