"""Exact event-driven simulation of continuous-time fictitious play.

While every player's best response is a unique pure action, the dynamics
``x' = b - x`` move straight toward the best-response vertex ``b``::

    x(t) = b + (x_start - b) * exp(-(t - t_start))

With ``s = exp(-(t - t_start))`` each player's payoff for a fixed pure
action is a polynomial in ``s`` of degree at most N-1, so best-response
switches are roots of low-degree polynomials. The simulator locates the
first root, jumps there in closed form and picks the next vertex.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from fprate.config import DEFAULT_TOLERANCES
from fprate.errors import DegenerateSegment, NonPotentialInput, NotConverged
from fprate.equilibria import deviation_payoffs, is_nash, _argmax_set
from fprate.game import as_xprofile, payoff_vector, to_simplex, vertex_profile
from fprate.potential import potential_violation

GRID_INTERVALS = 64


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MIXED_EQUILIBRIUM = "MixedEquilibriumReached"
    HORIZON = "HorizonReached"


@dataclass(frozen=True, eq=False)
class Segment:
    t_start: float
    t_end: float
    x_start: np.ndarray
    target: np.ndarray
    actions: tuple[int, ...]

    def state(self, t):
        dt = np.asarray(t, dtype=float) - self.t_start
        return self.target + np.multiply.outer(np.exp(-dt), self.x_start - self.target)

    def offset_from(self, ref, t):
        """``x(t) - ref`` without cancellation when ``ref`` equals the target."""
        dt = np.asarray(t, dtype=float) - self.t_start
        return (self.target - ref) + np.multiply.outer(np.exp(-dt), self.x_start - self.target)


@dataclass(frozen=True)
class Event:
    time: float
    player: int
    entering: tuple[int, ...]
    leaving: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "player": self.player + 1,
            "entering": [a + 1 for a in self.entering],
            "leaving": [a + 1 for a in self.leaving],
        }


@dataclass
class Trajectory:
    x0: np.ndarray
    segments: list[Segment]
    events: list[Event]
    status: Status
    limit: np.ndarray | None
    end_time: float
    horizon: float
    lock_margin: float | None = None
    notes: list[str] = field(default_factory=list)

    def segment_index(self, t) -> np.ndarray:
        starts = np.array([s.t_start for s in self.segments])
        idx = np.searchsorted(starts, np.asarray(t, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def state(self, t):
        """Profile at time(s) ``t``; rests at the limit after a mixed-equilibrium stop."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((t_arr.size, self.x0.size))
        if not self.segments:
            out[:] = self.x0
        else:
            idx = self.segment_index(t_arr)
            for k in np.unique(idx):
                mask = idx == k
                out[mask] = self.segments[k].state(t_arr[mask])
            if self.status is Status.MIXED_EQUILIBRIUM:
                out[t_arr >= self.end_time] = self.limit
        return out[0] if np.ndim(t) == 0 else out

    def sample(self, per_segment: int = 200):
        """Times, segment ids and states on ``per_segment`` interior points plus endpoints."""
        if not self.segments:
            return np.array([self.end_time]), np.array([0]), self.x0[None, :].copy()
        ts, ids, xs = [], [], []
        for k, seg in enumerate(self.segments):
            t = np.linspace(seg.t_start, seg.t_end, per_segment + 2)
            ts.append(t)
            ids.append(np.full(t.size, k))
            xs.append(seg.state(t))
        return np.concatenate(ts), np.concatenate(ids), np.vstack(xs)


def segment_solution(x0, b, dt: float) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    b = np.asarray(b, dtype=float)
    return b + (x0 - b) * math.exp(-dt)


# ------------------------------------------------------------------ events


def payoff_polynomials(pg, x, b) -> list[np.ndarray]:
    """Coefficients (in ``s``) of ``U(y_i^k, x_{-i}(s))`` along ``x(s) = b + (x - b) s``.

    Entry ``i`` has shape ``(K_i, N)``; column r multiplies ``s**r``.
    """
    n = pg.n_players
    alpha = to_simplex(pg.game, b)
    beta = [sx - sb for sx, sb in zip(to_simplex(pg.game, x), alpha)]
    polys = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        coeffs = np.zeros((pg.actions[i], n))
        for mask in itertools.product((0, 1), repeat=n - 1):
            s = list(alpha)
            for j, bit in zip(others, mask):
                if bit:
                    s[j] = beta[j]
            coeffs[:, sum(mask)] += payoff_vector(pg.potential, s, i)
        polys.append(coeffs)
    return polys


def _gap_polys(polys, actions):
    """``(player, rival, coeffs)`` for gap = U(current best) - U(rival)."""
    for i, a in enumerate(actions):
        for m in range(polys[i].shape[0]):
            if m != a:
                yield i, m, polys[i][a] - polys[i][m]


def _first_root(p, s_min: float):
    """Largest ``s`` in ``[s_min, 1)`` where the gap ``p`` falls from positive to <= 0."""
    nodes = np.linspace(1.0, s_min, GRID_INTERVALS + 1)
    deriv = P.polytrim(P.polyder(p))
    if deriv.size > 1:
        crit = [c.real for c in P.polyroots(deriv) if abs(c.imag) < 1e-12 and s_min < c.real < 1.0]
        if crit:
            # the gap is monotone between consecutive nodes, so no root can hide inside a bracket
            nodes = np.unique(np.concatenate([nodes, crit]))[::-1]
    vals = P.polyval(nodes, p)
    for k in range(1, nodes.size):
        if vals[k - 1] > 0 and vals[k] <= 0:
            if vals[k] == 0:
                return float(nodes[k])
            return brentq(lambda s: P.polyval(s, p), nodes[k], nodes[k - 1], xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return None


def _next_event(polys, actions, s_min: float, time_tol: float):
    """Earliest switch along a segment as ``(s, [(player, rival), ...])`` or ``None``."""
    roots = []
    for i, m, p in _gap_polys(polys, actions):
        s = _first_root(p, s_min)
        if s is not None and s > 0:
            roots.append((s, i, m))
    if not roots:
        return None
    s_star = max(r[0] for r in roots)
    pairs = [(i, m) for s, i, m in roots if math.log(s_star / s) <= time_tol]
    return s_star, pairs


def next_switch_time(pg, x0, b, horizon: float = 50.0, time_tol: float = DEFAULT_TOLERANCES.time, t_start: float = 0.0, tie_tol: float = DEFAULT_TOLERANCES.tie):
    """Time of the first best-response switch on the segment from ``x0`` toward ``b``.

    Returns ``None`` when the best response stays constant up to ``horizon``.
    """
    x0 = as_xprofile(pg.game, x0)
    dev = deviation_payoffs(pg, x0)
    sets = [_argmax_set(p, tie_tol) for p in dev]
    if any(len(s) > 1 for s in sets):
        raise DegenerateSegment(f"best response at x0 is not unique: {sets}")
    actions = tuple(s[0] for s in sets)
    if not np.allclose(vertex_profile(pg.game, actions), b):
        raise DegenerateSegment("b is not the best response at x0")
    s_min = 0.0 if math.isinf(horizon) else math.exp(-(horizon - t_start))
    hit = _next_event(payoff_polynomials(pg, x0, b), actions, s_min, time_tol)
    if hit is None:
        return None
    return t_start - math.log(hit[0])


def _germ_sign(p, tie_tol: float) -> int:
    """Sign of the gap polynomial just after the segment start (s slightly below 1)."""
    shifted = np.polynomial.Polynomial(p)(np.polynomial.Polynomial([1.0, -1.0])).coef
    scale = max(1.0, float(np.max(np.abs(p))))
    for r, c in enumerate(shifted):
        thr = tie_tol if r == 0 else 1e-12 * scale
        if c > thr:
            return 1
        if c < -thr:
            return -1
    return 0


def select_target(pg, x, tolerances=DEFAULT_TOLERANCES):
    """Best-response vertex to follow from ``x`` (as actions), or ``None`` at a tied equilibrium.

    Ties are resolved toward a vertex that stays a strict best response once
    the motion starts; among several, or if none exists, the
    lexicographically smallest tied choice wins.
    """
    sets = [_argmax_set(p, tolerances.tie) for p in deviation_payoffs(pg, x)]
    if all(len(s) == 1 for s in sets):
        return tuple(s[0] for s in sets), sets
    if is_nash(pg, x, tolerances.nash):
        return None, sets
    candidates = list(itertools.product(*sets))
    for cand in candidates:
        polys = payoff_polynomials(pg, x, vertex_profile(pg.game, cand))
        if all(
            _germ_sign(polys[i][cand[i]] - polys[i][m], tolerances.tie) > 0
            for i in range(pg.n_players)
            for m in sets[i]
            if m != cand[i]
        ):
            return cand, sets
    return candidates[0], sets


def strict_margin(pg, actions) -> float:
    """Smallest loss from a unilateral deviation at a pure profile (negative if not an NE)."""
    u = pg.potential
    y = tuple(actions)
    worst = np.inf
    for i in range(pg.n_players):
        line = u[y[:i] + (slice(None),) + y[i + 1 :]]
        worst = min(worst, float(u[y] - np.delete(line, y[i]).max()))
    return worst


def simulate_fp(pg, x0, horizon: float = 50.0, tolerances=DEFAULT_TOLERANCES, max_events: int = 10_000) -> Trajectory:
    """Integrate ``x' in BR(x) - x`` exactly from ``x0`` up to ``horizon``.

    The run stops with ``Converged`` once the followed vertex is a strict
    pure equilibrium and no best-response change can occur on the rest of
    the ray (checked exactly, over all future times), with
    ``MixedEquilibriumReached`` when it lands on an equilibrium with tied
    best responses, and with ``HorizonReached`` otherwise.
    """
    if potential_violation(pg.game, pg.potential) > tolerances.potential:
        raise NonPotentialInput("potential does not match the game's utilities")
    x = as_xprofile(pg.game, x0)
    x0 = x.copy()
    t = 0.0
    segments: list[Segment] = []
    events: list[Event] = []
    current, sets = select_target(pg, x, tolerances)
    while True:
        if current is None:
            for i, s in enumerate(sets):
                if len(s) > 1:
                    events.append(Event(t, i, tuple(s), ()))
            return Trajectory(x0, segments, events, Status.MIXED_EQUILIBRIUM, x, t, horizon)
        b = vertex_profile(pg.game, current)
        polys = payoff_polynomials(pg, x, b)
        hit = _next_event(polys, current, 0.0, tolerances.time)
        if hit is None:
            margin = strict_margin(pg, current)
            if margin > tolerances.tie and t < horizon:
                segments.append(Segment(t, horizon, x, b, current))
                return Trajectory(x0, segments, events, Status.CONVERGED, b, horizon, horizon, margin)
            segments.append(Segment(t, max(horizon, t), x, b, current))
            return Trajectory(x0, segments, events, Status.HORIZON, None, horizon, horizon)
        s_star, _ = hit
        t_event = t - math.log(s_star)
        if t_event > horizon:
            segments.append(Segment(t, horizon, x, b, current))
            return Trajectory(x0, segments, events, Status.HORIZON, None, horizon, horizon)
        segments.append(Segment(t, t_event, x, b, current))
        x = np.clip(b + (x - b) * s_star, 0.0, 1.0)
        t = t_event
        new, sets = select_target(pg, x, tolerances)
        if new is not None:
            for i, (old_a, new_a) in enumerate(zip(current, new)):
                if old_a != new_a:
                    events.append(Event(t, i, (new_a,), (old_a,)))
        current = new
        if len(events) > max_events:
            traj = Trajectory(x0, segments, events, Status.HORIZON, None, t, horizon)
            traj.notes.append("stopped after max_events switches")
            return traj


def detect_lock_time(traj: Trajectory, pg=None) -> dict:
    """Start of the final segment of a converged run and its target."""
    if traj.status is not Status.CONVERGED:
        raise NotConverged(f"trajectory status is {traj.status.value}")
    last = traj.segments[-1]
    return {"tau": last.t_start, "x_star": last.target.copy()}
