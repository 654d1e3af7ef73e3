"""Homotopy continuation for small block-multilinear polynomial systems.

Support enumeration with three or more mixing players produces equations
that are affine in each other player's block of unknowns. A linear-product
start system with the same block structure has exactly as many solutions as
the multihomogeneous Bezout bound, so far fewer paths diverge than with a
total-degree start.
"""

from __future__ import annotations

import itertools
import logging
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

MAX_PATHS = 20000


def _newton(fun, jac, z, iters, tol):
    for _ in range(iters):
        try:
            dz = np.linalg.solve(jac(z), -fun(z))
        except np.linalg.LinAlgError:
            return z, False
        z = z + dz
        if np.linalg.norm(dz) <= tol * (1.0 + np.linalg.norm(z)):
            return z, True
    return z, False


def _track(h, hz, ht, z, max_norm=1e6, h_min=1e-13):
    """Follow ``h(z, t) = 0`` from t=0 to t=1 with an RK4 predictor and Newton corrector."""
    t, dt, streak = 0.0, 0.01, 0

    def tangent(zz, tt):
        return np.linalg.solve(hz(zz, tt), -ht(zz, tt))

    while t < 1.0:
        dt = min(dt, 1.0 - t)
        try:
            k1 = tangent(z, t)
            k2 = tangent(z + 0.5 * dt * k1, t + 0.5 * dt)
            k3 = tangent(z + 0.5 * dt * k2, t + 0.5 * dt)
            k4 = tangent(z + dt * k3, t + dt)
            zp = z + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            ok = True
        except np.linalg.LinAlgError:
            ok = False
        if ok:
            tn = t + dt
            zc, ok = _newton(lambda v: h(v, tn), lambda v: hz(v, tn), zp, 3, 1e-10)
            # a large correction means the predictor left the path's basin
            if ok and np.linalg.norm(zc - zp) > 0.1 * (1.0 + np.linalg.norm(zp)):
                ok = False
        if ok:
            z, t = zc, tn
            streak += 1
            if streak >= 3:
                dt, streak = min(2 * dt, 0.1), 0
            if np.linalg.norm(z) > max_norm:
                return None
        else:
            dt, streak = dt / 2, 0
            if dt < h_min:
                return None
    return z


class LinearProductStart:
    """Start system ``g_e(z) = prod_{j in deps(e)} (a_ej . z_j + b_ej)``.

    ``blocks`` are the sizes of the variable blocks and ``deps[e]`` the blocks
    equation e depends on (affinely in each).
    """

    def __init__(self, blocks: Sequence[int], deps: Sequence[Sequence[int]], rng):
        self.blocks = list(blocks)
        self.offsets = np.concatenate([[0], np.cumsum(self.blocks)]).astype(int)
        self.deps = [list(d) for d in deps]
        self.n = int(self.offsets[-1])
        cplx = lambda *shape: rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        self.a = [{j: cplx(self.blocks[j]) for j in d} for d in self.deps]
        self.b = [{j: cplx(1)[0] for j in d} for d in self.deps]

    def _factors(self, z, e):
        return {j: self.a[e][j] @ z[self.offsets[j] : self.offsets[j + 1]] + self.b[e][j] for j in self.deps[e]}

    def value(self, z):
        return np.array([np.prod(list(self._factors(z, e).values())) for e in range(self.n)])

    def jacobian(self, z):
        jac = np.zeros((self.n, self.n), dtype=complex)
        for e in range(self.n):
            f = self._factors(z, e)
            for j in self.deps[e]:
                rest = np.prod([v for k, v in f.items() if k != j])
                jac[e, self.offsets[j] : self.offsets[j + 1]] = self.a[e][j] * rest
        return jac

    def assignments(self):
        """Choices of one factor per equation that give each block exactly its size."""
        need = list(self.blocks)

        def rec(e, chosen):
            if e == self.n:
                yield list(chosen)
                return
            for j in self.deps[e]:
                if need[j] > 0:
                    need[j] -= 1
                    chosen.append(j)
                    yield from rec(e + 1, chosen)
                    chosen.pop()
                    need[j] += 1

        yield from rec(0, [])

    def start_points(self):
        for choice in self.assignments():
            z = np.zeros(self.n, dtype=complex)
            for j in range(len(self.blocks)):
                rows = [e for e, c in enumerate(choice) if c == j]
                mat = np.array([self.a[e][j] for e in rows]).reshape(len(rows), self.blocks[j])
                rhs = -np.array([self.b[e][j] for e in rows])
                z[self.offsets[j] : self.offsets[j + 1]] = np.linalg.solve(mat, rhs) if rows else []
            yield z


def solve_block_multilinear(fun, jac, blocks, deps, seed: int = 0, imag_tol: float = 1e-7) -> list[np.ndarray]:
    """Real isolated roots of a square system that is affine in each variable block.

    ``fun``/``jac`` must accept complex vectors. The start system's random
    complex coefficients play the role of the gamma trick, so each isolated
    root is the endpoint of some path with probability one.
    """
    start = LinearProductStart(blocks, deps, np.random.default_rng(seed))
    if start.n == 0:
        return [np.zeros(0)]
    n_paths = sum(1 for _ in itertools.islice(start.assignments(), MAX_PATHS + 1))
    if n_paths > MAX_PATHS:
        log.warning("homotopy with more than %d paths; skipping", MAX_PATHS)
        return []

    def h(z, t):
        return (1 - t) * start.value(z) + t * fun(z)

    def hz(z, t):
        return (1 - t) * start.jacobian(z) + t * jac(z)

    def ht(z, t):
        return fun(z) - start.value(z)

    found: list[np.ndarray] = []
    for z0 in start.start_points():
        end = _track(h, hz, ht, z0)
        if end is None:
            continue
        z, _ = _newton(fun, jac, end, 30, 1e-14)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z.imag)) > imag_tol:
            continue
        x, _ = _newton(lambda v: fun(v).real, lambda v: jac(v).real, z.real, 10, 1e-15)
        if np.max(np.abs(fun(x))) > 1e-8:
            continue
        if not any(np.linalg.norm(x - f) < 1e-8 for f in found):
            found.append(x)
    return found
