"""Exact Euclidean projection onto an L1-ball intersected with a group-norm
ball, plus its building blocks and the restricted-support variant.

The projection is computed by a case analysis on which constraint is active.
When both are active, the optimal point is a soft-threshold at level
``lambda`` followed by a group-wise shrinkage at level ``eta``; ``lambda`` is
located by bisection against the monotone map ``lambda -> s1_of_lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DualPair",
    "ProjectionOutcome",
    "soft_threshold",
    "l1_ball_projection",
    "group_ball_projection",
    "eta_from_lambda",
    "s1_of_lambda",
    "compute_x_from_duals",
    "sglp",
    "restricted_sglp",
]


@dataclass(frozen=True)
class DualPair:
    """Non-negative multipliers of the L1 and group-norm constraints."""

    lam: float
    eta: float

    def __post_init__(self):
        if self.lam < 0 or self.eta < 0:
            raise ValueError("dual variables must be non-negative")


@dataclass
class ProjectionOutcome:
    """Projected point with the duals and active-constraint flags."""

    x: np.ndarray
    lam: float
    eta: float
    c1_active: bool
    c2_active: bool
    iterations: int


def soft_threshold(v, lam):
    """Elementwise sign(v) * max(|v| - lam, 0)."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - lam, 0.0)


def _simplex_threshold(u, radius):
    """Root ``theta >= 0`` of ``sum(max(u - theta, 0)) == radius``.

    ``u`` must be non-negative with ``sum(u) >= radius > 0``.  Expected
    linear time: median-pivot partitioning instead of a full sort.
    """
    work = u[u > 0]
    acc_sum = 0.0
    acc_cnt = 0
    while work.size:
        mid = work.size // 2
        pivot = np.partition(work, mid)[mid]
        hi = work > pivot
        hi_sum = float(work[hi].sum())
        hi_cnt = int(hi.sum())
        val = (acc_sum + hi_sum) - (acc_cnt + hi_cnt) * pivot
        if val > radius:
            work = work[hi]
        elif val < radius:
            acc_sum += hi_sum + pivot * (work.size - hi_cnt
                                         - int((work < pivot).sum()))
            acc_cnt += work.size - int((work < pivot).sum())
            work = work[work < pivot]
        else:
            return float(pivot)
    if acc_cnt == 0:
        # only reachable when radius >= sum(u): nothing to threshold
        return 0.0
    return (acc_sum - radius) / acc_cnt


def _l1_project_with_theta(v, radius):
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy(), 0.0
    theta = _simplex_threshold(a, radius)
    return soft_threshold(v, theta), theta


def l1_ball_projection(v, s1):
    """Projection of ``v`` onto the L1-ball of radius ``s1``."""
    if s1 <= 0:
        raise ValueError("s1 must be positive")
    x, _ = _l1_project_with_theta(v, s1)
    return x


def _group_project_with_eta(v, s2, partition):
    v = np.asarray(v, dtype=float)
    g = partition.group_norms(v)
    total = float(g.sum())
    if total <= s2:
        return v.copy(), 0.0
    eta = _simplex_threshold(g, s2)
    scale = np.zeros_like(g)
    nz = g > 0
    scale[nz] = np.maximum(g[nz] - eta, 0.0) / g[nz]
    return v * partition.expand(scale), eta


def group_ball_projection(v, s2, partition):
    """Projection of ``v`` onto the group-norm ball of radius ``s2``.

    Computed by projecting the vector of group norms onto the L1-ball and
    scaling each block radially; zero-norm blocks stay zero.
    """
    if s2 <= 0:
        raise ValueError("s2 must be positive")
    x, _ = _group_project_with_eta(v, s2, partition)
    return x


def eta_from_lambda(v, lam, s2, partition):
    """Group-level multiplier matching radius ``s2`` at a trial ``lam``.

    Returns the unique ``eta >= 0`` with
    ``sum_i max(||v_Gi^lam||_2 - eta, 0) == s2`` when the soft-thresholded
    group norms carry enough mass, otherwise ``None`` (the group constraint
    cannot be active at this ``lam``).
    """
    g = partition.group_norms(soft_threshold(v, lam))
    total = float(g.sum())
    if total < s2:
        return None
    if total == s2:
        return 0.0
    return float(_simplex_threshold(g, s2))


def s1_of_lambda(v, lam, eta, partition):
    """L1 norm of the candidate point implied by the duals (lam, eta).

    Groups whose soft-thresholded norm vanishes contribute zero.
    """
    vl = soft_threshold(v, lam)
    g2 = partition.group_norms(vl)
    g1 = partition.group_l1(vl)
    nz = g2 > 0
    shrink = np.maximum(g2[nz] - eta, 0.0)
    return float((shrink * g1[nz] / g2[nz]).sum())


def compute_x_from_duals(v, duals, partition):
    """Candidate point: soft-threshold at ``lam``, then group shrinkage at
    ``eta``; zero-norm thresholded groups map to zero blocks."""
    vl = soft_threshold(v, duals.lam)
    g2 = partition.group_norms(vl)
    scale = np.zeros_like(g2)
    nz = g2 > 0
    scale[nz] = np.maximum(g2[nz] - duals.eta, 0.0) / g2[nz]
    return vl * partition.expand(scale)


def _bisect_cap(lo, up, tol):
    return math.ceil(math.log2(max((up - lo) / tol, 1.0))) + 8


def sglp(v, s1, s2, partition, cfg):
    """Exact projection onto {||x||_1 <= s1} ∩ {||x||_G <= s2}.

    Cheap single-constraint cases are tried first; otherwise ``lambda`` is
    bisected on [0, max|v_j|], using the monotonicity of the induced L1
    norm in ``lambda``.
    """
    if s1 <= 0 or s2 <= 0:
        raise ValueError("radii must be positive")
    v = np.asarray(v, dtype=float)

    if np.abs(v).sum() <= s1 and partition.group_norms(v).sum() <= s2:
        return ProjectionOutcome(v.copy(), 0.0, 0.0, False, False, 0)

    x1, theta = _l1_project_with_theta(v, s1)
    if partition.group_norms(x1).sum() <= s2:
        return ProjectionOutcome(x1, theta, 0.0, True, False, 0)

    x2, eta2 = _group_project_with_eta(v, s2, partition)
    if np.abs(x2).sum() <= s1:
        return ProjectionOutcome(x2, 0.0, eta2, False, True, 0)

    lo, up = 0.0, float(np.abs(v).max())
    cap = _bisect_cap(lo, up, cfg.bisect_tol)
    it = 0
    while up - lo > cfg.bisect_tol:
        if it >= cap:
            raise RuntimeError("bisection failed to bracket lambda; "
                               "check bisect_tol")
        it += 1
        lam = 0.5 * (lo + up)
        eta = eta_from_lambda(v, lam, s2, partition)
        if eta is None:
            up = lam
        elif s1_of_lambda(v, lam, eta, partition) <= s1:
            up = lam
        else:
            lo = lam
    lam = up
    eta = eta_from_lambda(v, lam, s2, partition)
    if eta is None:
        eta = 0.0
    x = compute_x_from_duals(v, DualPair(lam, eta), partition)
    return ProjectionOutcome(x, lam, eta, True, True, it)


class _RestrictedView:
    """Precomputed index machinery for the support-restricted projection."""

    def __init__(self, partition, t1, t3):
        t1 = np.asarray(t1, dtype=np.intp)
        t3 = np.asarray(t3, dtype=np.intp)
        if t3.size and not np.isin(t3, t1).all():
            raise ValueError("t3 must be a subset of t1")
        labels = partition.labels
        t2 = np.unique(labels[t3]) if t3.size else np.zeros(0, dtype=np.intp)
        if t3.size != np.isin(labels, t2).sum():
            raise ValueError("t3 must be a union of whole groups")
        self.partition = partition
        self.t1 = t1
        self.t3 = t3
        self.t2 = t2
        in_t3 = np.zeros(partition.p, dtype=bool)
        in_t3[t3] = True
        in_t1 = np.zeros(partition.p, dtype=bool)
        in_t1[t1] = True
        self.t13 = np.flatnonzero(in_t1 & ~in_t3)
        # compact group ids for the t3 blocks
        remap = np.full(partition.n_groups, -1, dtype=np.intp)
        remap[t2] = np.arange(t2.size)
        self.t3_labels = remap[labels[t3]]
        self.k = t2.size

    def block_norms(self, x_t3):
        n2 = np.sqrt(np.bincount(self.t3_labels, weights=x_t3 * x_t3,
                                 minlength=self.k))
        n1 = np.bincount(self.t3_labels, weights=np.abs(x_t3),
                         minlength=self.k)
        return n2, n1


def restricted_sglp(v, s1, s2, t1, t3, partition, cfg):
    """Projection with the two norms restricted to supports ``t1``/``t3``.

    Coordinates outside ``t1`` are unconstrained and copied from ``v``;
    coordinates in ``t1 \\ t3`` see only the L1 constraint; the groups
    forming ``t3`` see both.  Same control flow as :func:`sglp` with the
    restricted counterparts of the dual equations.
    """
    if s1 <= 0 or s2 <= 0:
        raise ValueError("radii must be positive")
    v = np.asarray(v, dtype=float)
    view = _RestrictedView(partition, t1, t3)
    t1i, t3i, t13 = view.t1, view.t3, view.t13

    def t3_norm(z):
        return float(view.block_norms(z[t3i])[0].sum()) if t3i.size else 0.0

    if np.abs(v[t1i]).sum() <= s1 and t3_norm(v) <= s2:
        return ProjectionOutcome(v.copy(), 0.0, 0.0, False, False, 0)

    x1 = v.copy()
    x1[t1i], theta = _l1_project_with_theta(v[t1i], s1)
    if t3_norm(x1) <= s2:
        return ProjectionOutcome(x1, theta, 0.0, True, False, 0)

    x2 = v.copy()
    if t3i.size:
        g2, _ = view.block_norms(v[t3i])
        eta2 = _simplex_threshold(g2, s2)
        scale = np.zeros_like(g2)
        nz = g2 > 0
        scale[nz] = np.maximum(g2[nz] - eta2, 0.0) / g2[nz]
        x2[t3i] = v[t3i] * scale[view.t3_labels]
    else:
        eta2 = 0.0
    if np.abs(x2[t1i]).sum() <= s1:
        return ProjectionOutcome(x2, 0.0, eta2, False, True, 0)

    def duals_at(lam):
        vl1 = soft_threshold(v[t1i], lam)
        vl3 = soft_threshold(v[t3i], lam)
        g2, g1 = view.block_norms(vl3)
        total = float(g2.sum())
        if total < s2:
            return None, None
        eta = 0.0 if total == s2 else float(_simplex_threshold(g2, s2))
        nz = g2 > 0
        shrink = np.maximum(g2[nz] - eta, 0.0)
        s1_hat = float((shrink * g1[nz] / g2[nz]).sum())
        if t13.size:
            s1_hat += float(np.abs(soft_threshold(v[t13], lam)).sum())
        return eta, s1_hat

    lo, up = 0.0, float(np.abs(v[t1i]).max())
    cap = _bisect_cap(lo, up, cfg.bisect_tol)
    it = 0
    while up - lo > cfg.bisect_tol:
        if it >= cap:
            raise RuntimeError("bisection failed to bracket lambda; "
                               "check bisect_tol")
        it += 1
        lam = 0.5 * (lo + up)
        eta, s1_hat = duals_at(lam)
        if eta is None or s1_hat <= s1:
            up = lam
        else:
            lo = lam
    lam = up
    eta, _ = duals_at(lam)
    if eta is None:
        eta = 0.0
    x = v.copy()
    x[t13] = soft_threshold(v[t13], lam)
    vl3 = soft_threshold(v[t3i], lam)
    g2, _ = view.block_norms(vl3)
    scale = np.zeros_like(g2)
    nz = g2 > 0
    scale[nz] = np.maximum(g2[nz] - eta, 0.0) / g2[nz]
    x[t3i] = vl3 * scale[view.t3_labels]
    return ProjectionOutcome(x, lam, eta, True, True, it)
