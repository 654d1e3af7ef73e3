"""Best responses, Nash equilibrium enumeration and classification.

All best-response computations use the potential rather than the individual
utilities; both have the same unilateral argmax.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from fprate.config import DEFAULT_TOLERANCES
from fprate.errors import NotAnEquilibrium, NotStrictPure, TooLarge
from fprate.game import (
    as_xprofile,
    from_simplex,
    multilinear_value,
    payoff_vector,
    to_simplex,
    vertex_actions,
    vertex_profile,
)
from fprate.homotopy import solve_block_multilinear

log = logging.getLogger(__name__)

MAX_ENUMERATION_PROFILES = 64

_TOL = DEFAULT_TOLERANCES


def deviation_payoffs(pg, x) -> list[np.ndarray]:
    """``[U(y_i^k, x_{-i}) for k]`` for every player i."""
    sigmas = to_simplex(pg.game, x)
    return [payoff_vector(pg.potential, sigmas, i) for i in range(pg.n_players)]


def _argmax_set(values: np.ndarray, tie_tol: float) -> tuple[int, ...]:
    return tuple(int(k) for k in np.flatnonzero(values >= values.max() - tie_tol))


def pure_best_responses(pg, i: int, x, tie_tol: float = _TOL.tie) -> tuple[int, ...]:
    """Pure actions of player i within ``tie_tol`` of the best payoff against ``x_{-i}``.

    ``x`` is a full profile; player i's own block is ignored.
    """
    sigmas = to_simplex(pg.game, x)
    return _argmax_set(payoff_vector(pg.potential, sigmas, i), tie_tol)


@dataclass(frozen=True)
class BestResponseSet:
    actions: tuple[tuple[int, ...], ...]

    @property
    def is_singleton(self) -> bool:
        return all(len(a) == 1 for a in self.actions)

    def vertex(self, game) -> np.ndarray:
        if not self.is_singleton:
            raise ValueError("best response is not a unique vertex")
        return vertex_profile(game, [a[0] for a in self.actions])

    def contains(self, y) -> bool:
        return all(yi in a for yi, a in zip(y, self.actions))


def best_response_set(pg, x, tie_tol: float = _TOL.tie) -> BestResponseSet:
    return BestResponseSet(tuple(_argmax_set(p, tie_tol) for p in deviation_payoffs(pg, x)))


def is_nash(pg, x, tol: float = _TOL.nash) -> bool:
    sigmas = to_simplex(pg.game, x)
    for i in range(pg.n_players):
        p = payoff_vector(pg.potential, sigmas, i)
        if p.max() > sigmas[i] @ p + tol:
            return False
    return True


@dataclass(frozen=True)
class EquilibriumRecord:
    profile: np.ndarray = field(compare=False)
    kind: str
    strict: bool
    quasi_strict: bool
    regular: bool
    support: tuple[tuple[int, ...], ...]
    hessian_condition: float | None = field(default=None, compare=False)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    def to_dict(self, game) -> dict:
        return {
            "profile": [float(v) for v in self.profile],
            "simplex": [[float(v) for v in s] for s in to_simplex(game, self.profile, tol=1e-9)],
            "kind": self.kind,
            "strict": self.strict,
            "quasi_strict": self.quasi_strict,
            "regular": self.regular,
            "support": [[a + 1 for a in s] for s in self.support],
            "hessian_condition": self.hessian_condition,
        }


def _support_directions(k: int, support: tuple[int, ...]) -> np.ndarray:
    """Rows ``e_{s} - e_{s_0}`` spanning the face of the simplex on ``support``."""
    d = np.zeros((len(support) - 1, k))
    for row, a in enumerate(support[1:]):
        d[row, a] = 1.0
        d[row, support[0]] = -1.0
    return d


def support_hessian(pg, sigmas, support) -> np.ndarray:
    """Hessian of the multilinear potential in face coordinates of ``support``.

    Only players with more than one supported action contribute coordinates.
    Blocks on the diagonal vanish because the potential is linear in each
    player's own strategy.
    """
    players = [i for i, s in enumerate(support) if len(s) > 1]
    dirs = {i: _support_directions(pg.actions[i], support[i]) for i in players}
    index = [(i, r) for i in players for r in range(len(support[i]) - 1)]
    h = np.zeros((len(index), len(index)))
    for a, (i, k) in enumerate(index):
        for b, (j, l) in enumerate(index):
            if j <= i:
                continue
            s = list(sigmas)
            s[i] = dirs[i][k]
            s[j] = dirs[j][l]
            h[a, b] = h[b, a] = multilinear_value(pg.potential, s)
    return h


def classify_equilibrium(pg, x, tol: float = _TOL.nash, tolerances=_TOL) -> EquilibriumRecord:
    """Kind, strictness, quasi-strictness and regularity of an equilibrium.

    Pure equilibria are regular exactly when strict. A mixed equilibrium is
    counted regular when it is quasi-strict and the potential's Hessian on
    the support face is nonsingular (condition number below
    ``tolerances.max_condition``).
    """
    x = as_xprofile(pg.game, x, tol=1e-9)
    if not is_nash(pg, x, tol):
        raise NotAnEquilibrium(f"{x} is not a Nash equilibrium at tol {tol}")
    sigmas = to_simplex(pg.game, x, tol=1e-9)
    support = tuple(tuple(int(a) for a in np.flatnonzero(s > tolerances.support)) for s in sigmas)
    br = best_response_set(pg, x, tolerances.tie).actions
    quasi_strict = all(set(b) <= set(s) for b, s in zip(br, support))
    pure = all(len(s) == 1 for s in support)
    if pure:
        return EquilibriumRecord(x, "pure", quasi_strict, quasi_strict, quasi_strict, support)
    h = support_hessian(pg, sigmas, support)
    cond = float(np.linalg.cond(h)) if h.size else float("inf")
    regular = quasi_strict and cond < tolerances.max_condition
    return EquilibriumRecord(x, "mixed", False, quasi_strict, regular, support, cond)


def enumerate_pure_nash(pg, tol: float = _TOL.nash, tolerances=_TOL) -> list[EquilibriumRecord]:
    u = pg.potential
    mask = np.ones(u.shape, dtype=bool)
    for i in range(pg.n_players):
        mask &= u >= u.max(axis=i, keepdims=True) - tol
    return [
        classify_equilibrium(pg, vertex_profile(pg.game, y), tol, tolerances)
        for y in map(tuple, np.argwhere(mask))
    ]


# ------------------------------------------------------- support enumeration


class _SupportSystem:
    """Indifference equations of the mixing players on a fixed support profile.

    Unknowns are the face coordinates ``w_i`` of each mixing player, where
    ``sigma_i = e_{s_0} + sum_r w_i^r (e_{s_r} - e_{s_0})``. Equations say each
    mixing player is indifferent among its supported actions.
    """

    def __init__(self, pg, support):
        self.pg = pg
        self.support = support
        self.mixers = [i for i, s in enumerate(support) if len(s) > 1]
        self.dirs = {i: _support_directions(pg.actions[i], support[i]) for i in self.mixers}
        self.sizes = [len(support[i]) - 1 for i in self.mixers]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(int)
        self.n = int(self.offsets[-1])
        self.base = []
        for i, s in enumerate(support):
            e = np.zeros(pg.actions[i])
            e[s[0]] = 1.0
            self.base.append(e)

    def sigmas(self, w):
        s = list(self.base)
        for m, i in enumerate(self.mixers):
            wi = w[self.offsets[m] : self.offsets[m + 1]]
            s[i] = self.base[i] + wi @ self.dirs[i]
        return s

    def _gaps(self, sigmas, i):
        p = payoff_vector(self.pg.potential, sigmas, i)
        sup = self.support[i]
        return p[list(sup[1:])] - p[sup[0]]

    def residual(self, w):
        s = self.sigmas(w)
        return np.concatenate([self._gaps(s, i) for i in self.mixers])

    def jacobian(self, w):
        s = self.sigmas(w)
        jac = np.zeros((self.n, self.n), dtype=np.result_type(w, float))
        for a, i in enumerate(self.mixers):
            rows = slice(self.offsets[a], self.offsets[a + 1])
            for b, j in enumerate(self.mixers):
                if i == j:
                    continue
                for r in range(self.sizes[b]):
                    t = list(s)
                    t[j] = self.dirs[j][r]
                    jac[rows, self.offsets[b] + r] = self._gaps(t, i)
        return jac

    def to_profile(self, w):
        return from_simplex(self.sigmas(w), tol=1e-6)

    def candidates(self, tolerances) -> list[np.ndarray]:
        m = len(self.mixers)
        if m == 0:
            return [np.zeros(0)]
        if m == 1:
            # indifference would have to hold identically; isolated solutions cannot exist
            return []
        if m == 2:
            return self._solve_linear(tolerances)
        deps = [[b for b in range(m) if b != a] for a in range(m) for _ in range(self.sizes[a])]
        roots = solve_block_multilinear(self.residual, self.jacobian, self.sizes, deps)
        return [r for r in roots if np.max(np.abs(self.residual(r))) <= tolerances.residual]

    def _solve_linear(self, tolerances):
        # with two mixers, each one's equations are affine in the other's coordinates
        w0 = np.zeros(self.n)
        f0 = self.residual(w0)
        jac = self.jacobian(w0)
        w = np.zeros(self.n)
        for a in range(2):
            b = 1 - a
            rows = slice(self.offsets[a], self.offsets[a + 1])
            cols = slice(self.offsets[b], self.offsets[b + 1])
            mat = jac[rows, cols]
            sol, _, rank, sv = np.linalg.lstsq(mat, -f0[rows], rcond=None)
            if rank < self.sizes[b] or sv.min() <= 1e-12 * max(1.0, sv.max()):
                return []
            if np.max(np.abs(mat @ sol + f0[rows])) > tolerances.residual:
                return []
            w[cols] = sol
        return [w]


def _support_profiles(actions, max_support):
    per_player = [
        [c for size in range(1, min(k, max_support) + 1) for c in itertools.combinations(range(k), size)]
        for k in actions
    ]
    return sorted(itertools.product(*per_player))


def enumerate_mixed_nash(pg, max_support: int | None = None, tol: float = _TOL.nash, tolerances=_TOL) -> list[EquilibriumRecord]:
    """All isolated equilibria found by support enumeration, pure ones included.

    Every support profile with at most ``max_support`` actions per player is
    examined. Two mixing players give linear indifference systems; three or
    more give a multilinear system solved by homotopy continuation. Output
    is ordered lexicographically by support.
    """
    if pg.game.n_profiles > MAX_ENUMERATION_PROFILES:
        raise TooLarge(f"{pg.game.n_profiles} joint profiles exceed the enumeration guard of {MAX_ENUMERATION_PROFILES}")
    max_support = max_support or max(pg.actions)
    found = []
    for support in _support_profiles(pg.actions, max_support):
        system = _SupportSystem(pg, support)
        for w in system.candidates(tolerances):
            sigmas = system.sigmas(w)
            weights = np.concatenate([s[list(sup)] for s, sup in zip(sigmas, support)])
            if np.any(weights <= tolerances.support):
                continue
            if np.any(np.concatenate(sigmas) < -tolerances.negative_weight):
                continue
            x = np.clip(from_simplex(sigmas, tol=1e-6), 0.0, 1.0)
            if not is_nash(pg, x, tol):
                continue
            found.append(classify_equilibrium(pg, x, tol, tolerances))
    return found


def enumerate_nash(pg, tol: float = _TOL.nash, tolerances=_TOL) -> list[EquilibriumRecord]:
    """Every equilibrium, falling back to pure ones only for large games."""
    try:
        return enumerate_mixed_nash(pg, tol=tol, tolerances=tolerances)
    except TooLarge:
        log.warning("game too large for support enumeration; using pure equilibria only")
        return enumerate_pure_nash(pg, tol, tolerances)


def is_regular_game(equilibria) -> bool:
    return len(equilibria) > 0 and all(e.regular for e in equilibria)


# ------------------------------------------------------------- local lock


def _batch_payoffs(tensor, sigma_batches, i):
    """Payoff vectors of player i for a batch of profiles; shape ``(n, K_i)``."""
    n = sigma_batches[0].shape[0]
    t = np.broadcast_to(tensor, (n,) + tensor.shape)
    for j in reversed(range(len(sigma_batches))):
        if j == i:
            continue
        t = np.einsum("n...k,nk->n...", np.moveaxis(t, j + 1, -1), sigma_batches[j])
    return t


def sample_ball_in_x(game, center, radius, n_samples, rng, max_rounds: int = 1000):
    """Uniform samples from the Euclidean ball around ``center`` intersected with X."""
    dim = game.kappa
    out = []
    count = 0
    for _ in range(max_rounds):
        batch = max(4 * n_samples, 256)
        d = rng.standard_normal((batch, dim))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        pts = center + d * (radius * rng.random((batch, 1)) ** (1.0 / dim))
        ok = np.ones(batch, dtype=bool)
        for i in range(game.n_players):
            blk = pts[:, game.offsets[i] : game.offsets[i + 1]]
            ok &= np.all(blk >= 0, axis=1) & (blk.sum(axis=1) <= 1)
        out.append(pts[ok])
        count += int(ok.sum())
        if count >= n_samples:
            break
    return np.concatenate(out)[:n_samples]


def verify_local_br_lock(pg, x_star, radius: float, n_samples: int = 1000, seed=None, tie_tol: float = _TOL.tie) -> dict:
    """Check that ``x_star`` is the unique best response throughout a ball around it.

    Returns ``ok``, ``min_margin`` (smallest observed gap between the best and
    second-best payoff) and the number of samples drawn.
    """
    x_star = as_xprofile(pg.game, x_star)
    y = vertex_actions(pg.game, x_star)
    if y is None:
        raise NotStrictPure("x_star is not a pure profile")
    rec = classify_equilibrium(pg, x_star) if is_nash(pg, x_star) else None
    if rec is None or not rec.strict:
        raise NotStrictPure("x_star is not a strict pure Nash equilibrium")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = sample_ball_in_x(pg.game, x_star, radius, n_samples, rng)
    game = pg.game
    sig = []
    for i, k in enumerate(game.actions):
        blk = pts[:, game.offsets[i] : game.offsets[i + 1]]
        sig.append(np.column_stack([1.0 - blk.sum(axis=1), blk]))
    margin = np.inf
    for i in range(game.n_players):
        p = _batch_payoffs(pg.potential, sig, i)
        best = p[:, y[i]]
        others = np.delete(p, y[i], axis=1).max(axis=1)
        margin = min(margin, float((best - others).min()))
    return {"ok": bool(margin > tie_tol), "min_margin": margin, "n_samples": int(len(pts)), "radius": radius}


def lock_radius(pg, x_star, n_samples: int = 1000, seed=None, start: float = 1.0, shrink: float = 0.5, max_steps: int = 60) -> dict:
    """Shrink the radius until :func:`verify_local_br_lock` succeeds."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    radius = start
    res = None
    for _ in range(max_steps):
        res = verify_local_br_lock(pg, x_star, radius, n_samples, rng)
        if res["ok"]:
            return res
        radius *= shrink
    return res
