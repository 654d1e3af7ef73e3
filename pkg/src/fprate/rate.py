"""Distance to equilibrium and exponential rate certificates ``d(x(t), NE) <= c e^{-t}``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fprate.errors import EmptyEquilibriumList, NotConverged
from fprate.fpsim import Status, Trajectory, detect_lock_time

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _norm(v, metric: str):
    v = np.asarray(v, dtype=float)
    if metric == "euclidean":
        return np.linalg.norm(v, axis=-1)
    if metric == "sup":
        return np.max(np.abs(v), axis=-1) if v.shape[-1] else np.zeros(v.shape[:-1])
    raise ValueError(f"unknown metric {metric!r}")


def _profiles(equilibria):
    if len(equilibria) == 0:
        raise EmptyEquilibriumList("no equilibria supplied")
    return [np.asarray(getattr(e, "profile", e), dtype=float) for e in equilibria]


def distance_to_ne(pg, x, equilibria, metric: str = "euclidean") -> float:
    """Distance in X coordinates from ``x`` to the nearest listed equilibrium."""
    x = np.asarray(x, dtype=float).ravel()
    return float(min(_norm(x - e, metric) for e in _profiles(equilibria)))


def _segment_distance(seg, ref, t, metric):
    return _norm(seg.offset_from(ref, t), metric)


def trajectory_distance(traj: Trajectory, equilibria, t, metric: str = "euclidean") -> np.ndarray:
    """``d(x(t), NE)`` evaluated segment by segment without cancellation."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    profiles = _profiles(equilibria)
    if not traj.segments:
        return np.full(t.size, min(_norm(traj.x0 - e, metric) for e in profiles))
    idx = traj.segment_index(t)
    out = np.empty(t.size)
    for k in np.unique(idx):
        mask = idx == k
        seg = traj.segments[k]
        out[mask] = np.min([_segment_distance(seg, e, t[mask], metric) for e in profiles], axis=0)
    if traj.status is Status.MIXED_EQUILIBRIUM:
        late = t >= traj.end_time
        out[late] = min(_norm(traj.limit - e, metric) for e in profiles)
    return out


def _golden_max(f, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def segment_sup(seg, ref, t0: float, t1: float, metric: str = "euclidean", n_grid: int = 1000) -> float:
    """Maximum of ``d(x(t), ref)`` on ``[t0, t1]`` for one closed-form segment."""
    if t1 <= t0:
        return float(_segment_distance(seg, ref, t0, metric))
    t = np.linspace(t0, t1, n_grid + 2)
    d = _segment_distance(seg, ref, t, metric)
    k = int(np.argmax(d))
    best = float(d[k])
    lo, hi = t[max(k - 1, 0)], t[min(k + 1, t.size - 1)]
    _, val = _golden_max(lambda s: float(_segment_distance(seg, ref, s, metric)), lo, hi)
    return max(best, val)


@dataclass(frozen=True)
class RateCertificate:
    x_star: np.ndarray
    tau: float
    c: float
    lock_margin: float
    metric: str = "euclidean"

    def bound(self, t):
        return self.c * np.exp(-np.asarray(t, dtype=float))

    def to_dict(self, status: str = Status.CONVERGED.value) -> dict:
        return {
            "x_star": [float(v) for v in self.x_star],
            "tau": self.tau,
            "c": self.c,
            "lock_margin": self.lock_margin,
            "metric": self.metric,
            "status": status,
        }


def rate_certificate(traj: Trajectory, pg=None, metric: str = "euclidean") -> RateCertificate:
    """``c = e^tau * sup_{[0, tau]} d(x(t), x*)`` for a converged run."""
    if traj.status is not Status.CONVERGED:
        raise NotConverged(f"trajectory status is {traj.status.value}; no certificate exists")
    lock = detect_lock_time(traj, pg)
    tau, x_star = lock["tau"], lock["x_star"]
    sup = float(_norm(traj.segments[-1].x_start - x_star, metric))
    for seg in traj.segments[:-1]:
        sup = max(sup, segment_sup(seg, x_star, seg.t_start, seg.t_end, metric))
    return RateCertificate(x_star, tau, math.exp(tau) * sup, float(traj.lock_margin), metric)


def verify_bound(traj: Trajectory, cert: RateCertificate, equilibria, tol: float = 1e-9, per_segment: int = 200) -> dict:
    """Check ``d(x(t), NE) <= c e^{-t} + tol`` on the trajectory's sampling grid."""
    t, _, _ = traj.sample(per_segment)
    slack = trajectory_distance(traj, equilibria, t, cert.metric) - cert.bound(t)
    worst = float(slack.max())
    return {"ok": worst <= tol, "worst_slack": worst}


def post_lock_decay_error(traj: Trajectory, cert: RateCertificate, per_segment: int = 200) -> float:
    """``max |d(x(t), x*) - d(x(tau), x*) e^{tau - t}|`` over the sampled final segment."""
    last = traj.segments[-1]
    t = np.linspace(last.t_start, last.t_end, per_segment + 2)
    d = _segment_distance(last, cert.x_star, t, cert.metric)
    d_tau = float(_norm(last.x_start - cert.x_star, cert.metric))
    return float(np.max(np.abs(d - d_tau * np.exp(cert.tau - t))))


def fit_decay(traj: Trajectory, t_from: float = 0.0, per_segment: int = 200, metric: str = "euclidean", min_samples: int = 10):
    """Least-squares decay rate of ``log d(x(t), x*)`` after ``t_from``.

    ``x*`` is the trajectory's limit. Returns ``None`` for runs that did not
    converge or when fewer than ``min_samples`` grid points carry a distance
    above 1e-14.
    """
    if traj.status is not Status.CONVERGED or not traj.segments:
        return None
    t, ids, _ = traj.sample(per_segment)
    keep = t >= t_from
    t, ids = t[keep], ids[keep]
    d = np.empty(t.size)
    for k in np.unique(ids):
        mask = ids == k
        d[mask] = _segment_distance(traj.segments[k], traj.limit, t[mask], metric)
    pos = d > 1e-14
    if pos.sum() < min_samples:
        return None
    t, logd = t[pos], np.log(d[pos])
    slope, intercept = np.polyfit(t, logd, 1)
    resid = logd - (slope * t + intercept)
    ss_tot = float(np.sum((logd - logd.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return {"lambda": float(-slope), "r_squared": r2, "n_samples": int(t.size)}
