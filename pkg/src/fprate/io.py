"""File formats: game JSON, trajectory CSV, event log and certificate JSON.

Game JSON::

    {"players": N, "actions": [K_1, ..., K_N],
     "utilities": [[...], ...],      # one flat row-major array per player
     "potential": [...]}             # optional flat array

Trajectory CSV columns are ``t, segment_id, x<i>_<k>..., U, d_ne`` where
``x<i>_<k>`` is the weight player i puts on action k (both 1-based, k >= 2);
coordinates appear in X-profile order.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from fprate.equilibria import _batch_payoffs
from fprate.game import Game, validate_game
from fprate.potential import PotentialGame, as_potential_game


def game_to_dict(game) -> dict:
    pg = game if isinstance(game, PotentialGame) else None
    g = pg.game if pg is not None else game
    out = {
        "players": g.n_players,
        "actions": list(g.actions),
        "utilities": [[float(v) for v in u.ravel()] for u in g.utilities],
    }
    if pg is not None:
        out["potential"] = [float(v) for v in pg.potential.ravel()]
    return out


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_game(path) -> tuple[Game, np.ndarray | None]:
    raw = json.loads(Path(path).read_text())
    game = validate_game(raw)
    potential = raw.get("potential")
    return game, (None if potential is None else np.asarray(potential, dtype=float))


def load_potential_game(path, tol: float | None = None) -> PotentialGame:
    """Read a game file; verify the stored potential or extract one."""
    game, potential = read_game(path)
    kwargs = {} if tol is None else {"tol": tol}
    return as_potential_game(game, potential, **kwargs)


def coordinate_names(game: Game) -> list[str]:
    return [f"x{i + 1}_{k + 1}" for i, ki in enumerate(game.actions) for k in range(1, ki)]


def potential_along(pg, xs: np.ndarray) -> np.ndarray:
    """Multilinear potential at each row of ``xs`` (X profiles)."""
    game = pg.game
    sig = []
    for i in range(game.n_players):
        blk = xs[:, game.offsets[i] : game.offsets[i + 1]]
        sig.append(np.column_stack([1.0 - blk.sum(axis=1), blk]))
    p0 = _batch_payoffs(pg.potential, sig, 0)
    return np.einsum("nk,nk->n", p0, sig[0])


def write_trajectory_csv(path, traj, pg, equilibria, per_segment: int = 200, metric: str = "euclidean") -> None:
    from fprate.rate import trajectory_distance

    t, ids, xs = traj.sample(per_segment)
    u = potential_along(pg, xs)
    d = trajectory_distance(traj, equilibria, t, metric)
    if hasattr(path, "write"):
        _write_rows(path, pg.game, t, ids, xs, u, d)
    else:
        with open(path, "w", newline="") as fh:
            _write_rows(fh, pg.game, t, ids, xs, u, d)


def _write_rows(fh, game, t, ids, xs, u, d):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "segment_id", *coordinate_names(game), "U", "d_ne"])
    for ti, k, x, ui, di in zip(t, ids, xs, u, d):
        w.writerow([repr(float(ti)), int(k), *(repr(float(v)) for v in x), repr(float(ui)), repr(float(di))])


def trajectory_summary(traj) -> dict:
    return {
        "status": traj.status.value,
        "end_time": traj.end_time,
        "horizon": traj.horizon,
        "limit": None if traj.limit is None else [float(v) for v in traj.limit],
        "n_segments": len(traj.segments),
        "segments": [
            {
                "t_start": s.t_start,
                "t_end": s.t_end,
                "x_start": [float(v) for v in s.x_start],
                "target_actions": [a + 1 for a in s.actions],
            }
            for s in traj.segments
        ],
        "events": [e.to_dict() for e in traj.events],
        "notes": list(traj.notes),
    }
