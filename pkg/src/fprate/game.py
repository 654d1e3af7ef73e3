"""Normal-form games, mixed-strategy coordinates and multilinear evaluation.

Conventions
-----------
* Utility and potential tensors have shape ``(K_1, ..., K_N)`` (row-major,
  last player fastest when flattened).
* Players and actions are 0-based in the Python API. The JSON/CLI layer
  converts to 1-based indices.
* A *simplex profile* is a tuple of per-player probability vectors.
* An *X profile* is the flat vector ``(x_1, ..., x_N)`` of reduced
  coordinates, where ``x_i`` drops the weight of player i's first action.
  Its length is ``kappa = sum(K_i - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from fprate.config import DEFAULT_TOLERANCES
from fprate.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidCounts,
    InvalidSimplex,
    OutOfPolytope,
)

SimplexProfile = tuple  # tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class Game:
    actions: tuple[int, ...]
    utilities: tuple[np.ndarray, ...]

    @property
    def n_players(self) -> int:
        return len(self.actions)

    @property
    def n_profiles(self) -> int:
        return int(np.prod(self.actions))

    @property
    def kappa(self) -> int:
        return kappa(self)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """Start index of each player's block in a flat X profile."""
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(np.array(self.actions) - 1)]))

    def block(self, x: np.ndarray, i: int) -> np.ndarray:
        return x[self.offsets[i] : self.offsets[i + 1]]


def _as_counts(game) -> tuple[int, ...]:
    if isinstance(game, Game):
        return game.actions
    if hasattr(game, "game"):
        return game.game.actions
    return tuple(int(k) for k in game)


def _check_counts(actions: Sequence[int]) -> tuple[int, ...]:
    actions = tuple(int(k) for k in actions)
    if len(actions) < 2:
        raise InvalidCounts(f"need at least 2 players, got {len(actions)}")
    if any(k < 2 for k in actions):
        raise InvalidCounts(f"every player needs at least 2 actions, got {actions}")
    return actions


def as_tensor(values, actions: Sequence[int]) -> np.ndarray:
    """Reshape a flat (row-major) or nested array into a read-only tensor."""
    arr = np.array(values, dtype=float)
    size = int(np.prod(actions))
    if arr.size != size:
        raise DimensionMismatch(f"tensor has {arr.size} entries, expected {size} for actions {tuple(actions)}")
    arr = arr.reshape(tuple(actions))
    arr.flags.writeable = False
    return arr


def validate_game(raw) -> Game:
    """Build a ``Game`` from a mapping with ``players``, ``actions`` and ``utilities``.

    ``utilities`` holds one tensor per player, either flat in row-major order
    or nested. ``players`` may be omitted, in which case it is inferred.
    """
    actions = list(raw["actions"])
    n = raw.get("players", len(actions))
    if n != len(actions):
        raise InvalidCounts(f"players={n} but {len(actions)} action counts given")
    actions = _check_counts(actions)
    utilities = raw["utilities"]
    if len(utilities) != len(actions):
        raise DimensionMismatch(f"{len(utilities)} utility tensors for {len(actions)} players")
    return Game(actions, tuple(as_tensor(u, actions) for u in utilities))


def kappa(game) -> int:
    """Dimension of the reduced strategy space."""
    return sum(k - 1 for k in _as_counts(game))


def as_xprofile(game, x, tol: float = DEFAULT_TOLERANCES.simplex) -> np.ndarray:
    """Coerce ``x`` (flat or per-player nested) to a validated flat X profile."""
    actions = _as_counts(game)
    if len(x) == len(actions) and all(np.ndim(xi) == 1 for xi in x):
        flat = np.concatenate([np.asarray(xi, dtype=float) for xi in x])
    else:
        flat = np.asarray(x, dtype=float).ravel()
    if flat.size != sum(k - 1 for k in actions):
        raise DimensionMismatch(f"X profile of length {flat.size} does not match actions {actions}")
    start = 0
    for k in actions:
        xi = flat[start : start + k - 1]
        if np.any(xi < -tol) or np.any(xi > 1 + tol) or xi.sum() > 1 + tol:
            raise OutOfPolytope(f"x block {xi} is outside the reduced simplex")
        start += k - 1
    return flat


def to_simplex(game, x, tol: float = DEFAULT_TOLERANCES.simplex) -> SimplexProfile:
    """Map reduced coordinates to per-player probability vectors."""
    actions = _as_counts(game)
    flat = as_xprofile(actions, x, tol)
    sigmas = []
    start = 0
    for k in actions:
        xi = flat[start : start + k - 1]
        sigmas.append(np.concatenate([[1.0 - xi.sum()], xi]))
        start += k - 1
    return tuple(sigmas)


def from_simplex(sigma: Sequence, tol: float = DEFAULT_TOLERANCES.simplex) -> np.ndarray:
    """Inverse of :func:`to_simplex`: drop each player's first weight."""
    blocks = []
    for s in sigma:
        s = np.asarray(s, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise InvalidSimplex(f"mixed strategy {s} must be a vector of length >= 2")
        if np.any(s < -tol) or abs(s.sum() - 1.0) > tol:
            raise InvalidSimplex(f"{s} is not a probability vector")
        blocks.append(s[1:])
    return np.concatenate(blocks)


def vertex_profile(game, y: Sequence[int]) -> np.ndarray:
    """X profile putting all mass on the joint pure strategy ``y`` (0-based)."""
    actions = _as_counts(game)
    if len(y) != len(actions):
        raise IndexOutOfRange(f"profile {tuple(y)} has wrong length for actions {actions}")
    blocks = []
    for yi, k in zip(y, actions):
        if not 0 <= yi < k:
            raise IndexOutOfRange(f"action {yi} out of range for a player with {k} actions")
        b = np.zeros(k - 1)
        if yi > 0:
            b[yi - 1] = 1.0
        blocks.append(b)
    return np.concatenate(blocks)


def vertex_actions(game, x: np.ndarray, tol: float = 1e-12) -> tuple[int, ...] | None:
    """Inverse of :func:`vertex_profile`; ``None`` if ``x`` is not a vertex."""
    sigmas = to_simplex(game, x, tol=max(tol, DEFAULT_TOLERANCES.simplex))
    y = []
    for s in sigmas:
        a = int(np.argmax(s))
        if abs(s[a] - 1.0) > tol:
            return None
        y.append(a)
    return tuple(y)


# ---------------------------------------------------------------- evaluation


def multilinear_value(tensor: np.ndarray, sigmas: Sequence[np.ndarray]):
    """``sum_y tensor[y] * prod_j sigma_j[y_j]``."""
    t = tensor
    for j in reversed(range(len(sigmas))):
        t = np.tensordot(t, sigmas[j], axes=([j], [0]))
    return t[()] if np.ndim(t) == 0 else t


def payoff_vector(tensor: np.ndarray, sigmas: Sequence[np.ndarray], i: int) -> np.ndarray:
    """Values ``tensor(y_i^k, sigma_{-i})`` for every action k of player i.

    Works for complex ``sigmas`` too (used by the homotopy solver).
    """
    t = tensor
    for j in reversed(range(len(sigmas))):
        if j != i:
            t = np.tensordot(t, sigmas[j], axes=([j], [0]))
    return t


def expected_utility(game: Game, i: int, sigma: Sequence) -> float:
    if not 0 <= i < game.n_players:
        raise IndexOutOfRange(f"player {i} out of range")
    sigma = [np.asarray(s, dtype=float) for s in sigma]
    from_simplex(sigma)
    return float(multilinear_value(game.utilities[i], sigma))


def expected_potential(pg, x) -> float:
    """Multilinear extension of the potential evaluated at an X profile."""
    return float(multilinear_value(pg.potential, to_simplex(pg.game, x)))


def expected_potential_expanded(pg, x, i: int) -> float:
    """Same value as :func:`expected_potential`, expanded along player i's coordinates.

    ``U(x) = sum_k x_i^k U(y_i^{k+1}, x_{-i}) + (1 - sum_k x_i^k) U(y_i^1, x_{-i})``.
    """
    flat = as_xprofile(pg.game, x)
    sigmas = to_simplex(pg.game, flat)
    dev = payoff_vector(pg.potential, sigmas, i)
    xi = pg.game.block(flat, i)
    return float(xi @ dev[1:] + (1.0 - xi.sum()) * dev[0])
