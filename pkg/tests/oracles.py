"""Independent reference computations used only by the tests.

None of these call into the package's evaluation paths: they enumerate,
brute-force or integrate directly from utility tables.
"""

import itertools

import numpy as np


def brute_multilinear(tensor, sigmas):
    total = 0.0
    for y in itertools.product(*(range(len(s)) for s in sigmas)):
        w = 1.0
        for yi, s in zip(y, sigmas):
            w *= s[yi]
        total += tensor[y] * w
    return total


def x_to_sigmas(actions, x):
    out, k0 = [], 0
    for k in actions:
        xi = np.asarray(x[k0 : k0 + k - 1], dtype=float)
        out.append(np.concatenate([[1 - xi.sum()], xi]))
        k0 += k - 1
    return out


def brute_pure_nash(utilities):
    """Pure equilibria from the players' own utilities (not the potential)."""
    shape = utilities[0].shape
    found = []
    for y in itertools.product(*(range(k) for k in shape)):
        ok = True
        for i, u in enumerate(utilities):
            for a in range(shape[i]):
                z = list(y)
                z[i] = a
                if u[tuple(z)] > u[y] + 1e-12:
                    ok = False
        if ok:
            found.append(y)
    return found


def binary_three_player_interior_nash(potential):
    """Fully mixed equilibria of a 2x2x2 potential game by explicit elimination.

    With x_i the weight on action 2, each player's indifference is bilinear
    in the other two weights; eliminating x_1 and x_2 leaves a quadratic in x_3.
    """
    u = np.asarray(potential, dtype=float)

    def coeffs(i):
        # gap_i = a + b*x_j + c*x_k + d*x_j*x_k for (j, k) the other players in order
        diff = np.take(u, 1, axis=i) - np.take(u, 0, axis=i)
        a = diff[0, 0]
        b = diff[1, 0] - diff[0, 0]
        c = diff[0, 1] - diff[0, 0]
        d = diff[1, 1] - diff[1, 0] - diff[0, 1] + diff[0, 0]
        return a, b, c, d

    a1, b1, c1, d1 = coeffs(0)  # in (x2, x3)
    a2, b2, c2, d2 = coeffs(1)  # in (x1, x3)
    a3, b3, c3, d3 = coeffs(2)  # in (x1, x2)
    P = np.polynomial.Polynomial
    N1, D1 = P([a1, c1]), P([b1, d1])  # x2 = -N1/D1
    N2, D2 = P([a2, c2]), P([b2, d2])  # x1 = -N2/D2
    poly = a3 * D1 * D2 - b3 * N2 * D1 - c3 * N1 * D2 + d3 * N1 * N2
    sols = []
    for r in poly.roots():
        if abs(r.imag) > 1e-9:
            continue
        x3 = r.real
        x2 = -N1(x3) / D1(x3)
        x1 = -N2(x3) / D2(x3)
        if all(0 < v < 1 for v in (x1, x2, x3)):
            sols.append(np.array([x1, x2, x3]))
    return sols


def euler_fp_bimatrix(A, B, x1, x2, h=1e-4, T=10.0, keep_every=10):
    """Forward Euler for fictitious play on a batch of bimatrix games.

    ``A[g], B[g]`` are the row/column players' utility matrices. Ties go to
    the lowest action index. Returns the time grid and X profiles of shape
    ``(steps, G, K1 - 1 + K2 - 1)``.
    """
    G, K1, K2 = A.shape
    s1 = np.column_stack([1 - x1.sum(axis=1), x1])
    s2 = np.column_stack([1 - x2.sum(axis=1), x2])
    n = int(round(T / h))
    eye1, eye2 = np.eye(K1), np.eye(K2)
    times, states = [], []
    for step in range(n + 1):
        if step % keep_every == 0:
            times.append(step * h)
            states.append(np.concatenate([s1[:, 1:], s2[:, 1:]], axis=1))
        if step == n:
            break
        b1 = np.argmax(np.einsum("gij,gj->gi", A, s2), axis=1)
        b2 = np.argmax(np.einsum("gij,gi->gj", B, s1), axis=1)
        s1 = s1 + h * (eye1[b1] - s1)
        s2 = s2 + h * (eye2[b2] - s2)
    return np.array(times), np.array(states)


def dense_sup_distance(x_start, target, ref, t0, t1, n=200_001):
    t = np.linspace(t0, t1, n)
    x = target[None, :] + np.exp(-(t - t0))[:, None] * (x_start - target)[None, :]
    return np.linalg.norm(x - ref, axis=1).max()
