"""Shared independent oracles used to derive expected values in the tests.

Each oracle is deliberately implemented with a different algorithm than the
package code (naive loops, sorting, long-run alternating projections) so a
bug in the implementation cannot hide in the reference.
"""

import numpy as np

from sgfs.baselines import StopRule, dykstra_project


def naive_objective(A, y, x):
    """Double-loop evaluation of 0.5 * ||A x - y||^2."""
    total = 0.0
    for i in range(len(y)):
        row = 0.0
        for j in range(len(x)):
            row += A[i][j] * x[j]
        total += (row - y[i]) ** 2
    return 0.5 * total


def sort_l1_projection(v, s1):
    """Sort-and-scan reference for the L1-ball projection."""
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= s1:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u - (css - s1) / np.arange(1, a.size + 1) > 0)[0][-1]
    theta = (css[rho] - s1) / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def dykstra_oracle(v, s1, s2, partition, x_tol=1e-13, max_iter=1000000):
    """Long-run Dykstra iteration: converges to the exact projection."""
    stop = StopRule(rel_tol=0.0, x_tol=x_tol, max_iter=max_iter)
    x, state = dykstra_project(v, s1, s2, partition, stop=stop)
    assert state.converged, "oracle did not stagnate"
    return x


def kkt_residual(v, x, lam, eta, partition):
    """Optimality residual of x for min 0.5||x-v||^2 + lam*||x||_1 + eta*||x||_G.

    Zero (up to round-off) iff x is the minimizer for the given duals.
    """
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    res = 0.0
    for idx in partition.groups:
        xg, vg = x[idx], v[idx]
        ng = np.linalg.norm(xg)
        if ng > 0:
            for j in range(idx.size):
                grad_gn = eta * xg[j] / ng
                if xg[j] != 0:
                    r = xg[j] - vg[j] + lam * np.sign(xg[j]) + grad_gn
                    res = max(res, abs(r))
                else:
                    # subgradient of |.| lies in [-1, 1]
                    r = max(abs(vg[j] - grad_gn) - lam, 0.0)
                    res = max(res, r)
        else:
            # group block at zero: need ||soft_threshold(vg, lam)|| <= eta
            g = np.maximum(np.abs(vg) - lam, 0.0)
            res = max(res, max(np.linalg.norm(g) - eta, 0.0))
    return res


def enumerate_l0(A, y, labels, s1, s2):
    """Brute-force best-subset least squares (independent of l0_oracle)."""
    import itertools

    p = A.shape[1]
    best = (np.inf, np.zeros(p))
    for k in range(s1 + 1):
        for sup in itertools.combinations(range(p), k):
            if len({labels[j] for j in sup}) > s2:
                continue
            x = np.zeros(p)
            if sup:
                cols = A[:, list(sup)]
                coef = np.linalg.lstsq(cols, y, rcond=None)[0]
                x[list(sup)] = coef
            r = A @ x - y
            f = 0.5 * float(r @ r)
            if f < best[0] - 1e-12:
                best = (f, x)
    return best
