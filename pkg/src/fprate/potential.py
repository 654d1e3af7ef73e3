"""Exact potential games: verification, extraction and random sampling."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fprate.config import DEFAULT_TOLERANCES
from fprate.errors import DimensionMismatch, NotPotentialGame
from fprate.game import Game, _check_counts, as_tensor


@dataclass(frozen=True, eq=False)
class PotentialGame:
    game: Game
    potential: np.ndarray

    @property
    def actions(self) -> tuple[int, ...]:
        return self.game.actions

    @property
    def n_players(self) -> int:
        return self.game.n_players


def potential_violation(game: Game, candidate: np.ndarray) -> float:
    """Largest ``|(u_i(y') - u_i(y'')) - (u(y') - u(y''))|`` over unilateral deviations.

    For each player the residual ``u_i - u`` must not depend on the player's
    own action; its spread along axis i is exactly the worst deviation error.
    """
    worst = 0.0
    for i, ui in enumerate(game.utilities):
        r = ui - candidate
        spread = r.max(axis=i) - r.min(axis=i)
        worst = max(worst, float(spread.max()))
    return worst


def check_exact_potential(game: Game, candidate, tol: float = DEFAULT_TOLERANCES.potential) -> dict:
    candidate = np.asarray(candidate, dtype=float)
    if candidate.size != game.n_profiles:
        raise DimensionMismatch(f"candidate has {candidate.size} entries, expected {game.n_profiles}")
    v = potential_violation(game, candidate.reshape(game.actions))
    return {"ok": v <= tol, "max_violation": v}


def extract_potential(game: Game, tol: float = DEFAULT_TOLERANCES.potential) -> PotentialGame:
    """Recover the potential by telescoping deviations along ``(0,..,0) -> y``.

    The path changes players' actions one at a time, in player order, so
    ``u(y) = sum_i [u_i(y_1..y_i, 0..0) - u_i(y_1..y_{i-1}, 0, 0..0)]`` with
    ``u(0,..,0) = 0``. Raises ``NotPotentialGame`` when the result does not
    reproduce every player's deviation differences.
    """
    n = game.n_players
    u = np.zeros(game.actions)
    for i, ui in enumerate(game.utilities):
        # u_i restricted to profiles whose players after i play action 0
        tail = (slice(None),) * (i + 1) + (0,) * (n - i - 1)
        head = ui[tail]
        step = head - np.take(head, [0], axis=i)
        u += step.reshape(step.shape + (1,) * (n - i - 1))
    check = check_exact_potential(game, u, tol)
    if not check["ok"]:
        raise NotPotentialGame(
            f"game admits no exact potential (max violation {check['max_violation']:.3g})",
            check["max_violation"],
        )
    u.flags.writeable = False
    return PotentialGame(game, u)


def cycle_violation(game: Game) -> float:
    """Largest absolute signed sum of utility changes around 4-cycles.

    Each cycle lets players i and j alternate unilateral deviations inside a
    2x2 restriction with the other players fixed. Exact potential games give
    zero on every cycle.
    """
    worst = 0.0
    for i, j in itertools.combinations(range(game.n_players), 2):
        ui = np.moveaxis(game.utilities[i], (i, j), (0, 1))
        uj = np.moveaxis(game.utilities[j], (i, j), (0, 1))
        for a, a2 in itertools.combinations(range(game.actions[i]), 2):
            for b, b2 in itertools.combinations(range(game.actions[j]), 2):
                s = (
                    (ui[a2, b] - ui[a, b])
                    + (uj[a2, b2] - uj[a2, b])
                    + (ui[a, b2] - ui[a2, b2])
                    + (uj[a, b] - uj[a, b2])
                )
                worst = max(worst, float(np.max(np.abs(s))))
    return worst


def param_dim(action_counts: Sequence[int]) -> int:
    """Dimension of the space of potential games with the given action counts."""
    k = [int(c) for c in action_counts]
    total = int(np.prod(k))
    return sum(total // ki for ki in k) + len(k) + total - 1


def sample_potential_game(action_counts: Sequence[int], seed=None) -> PotentialGame:
    """Random potential game ``u_i = w + q_i(y_{-i})`` with standard normal entries.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    actions = _check_counts(action_counts)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    w = rng.standard_normal(actions)
    utilities = []
    for i in range(len(actions)):
        dummy_shape = tuple(1 if j == i else k for j, k in enumerate(actions))
        q = rng.standard_normal(dummy_shape)
        utilities.append(as_tensor(w + q, actions))
    return PotentialGame(Game(actions, tuple(utilities)), as_tensor(w, actions))


def as_potential_game(game: Game, potential=None, tol: float = DEFAULT_TOLERANCES.potential) -> PotentialGame:
    """Wrap a game with a given potential (verified) or extract one."""
    if potential is None:
        return extract_potential(game, tol)
    check = check_exact_potential(game, potential, tol)
    if not check["ok"]:
        raise NotPotentialGame(
            f"supplied potential is inconsistent (max violation {check['max_violation']:.3g})",
            check["max_violation"],
        )
    return PotentialGame(game, as_tensor(potential, game.actions))


def common_interest(potential, actions: Sequence[int] | None = None) -> PotentialGame:
    """Game in which every player's utility equals ``potential``."""
    arr = np.asarray(potential, dtype=float)
    actions = _check_counts(actions if actions is not None else arr.shape)
    w = as_tensor(arr, actions)
    return PotentialGame(Game(actions, tuple(w for _ in actions)), w)
