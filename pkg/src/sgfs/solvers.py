"""Accelerated projected gradient for the convex ball-constrained problems
and the outer difference-of-convex loop for the count-constrained model.

Each DC outer iteration linearizes the concave part of the capped-L1
constraints around the current iterate, which restricts the norm constraints
to the small-magnitude supports and shrinks their radii by the number of
already-saturated features/groups.  The resulting convex subproblem is
solved by the accelerated method with the (restricted) two-ball projection
as its prox step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (GroupPartition, ProblemInstance, SparsityBudget,
                    SupportSets, objective)
from .projection import restricted_sglp, sglp

__all__ = ["AgmState", "DcTrace", "agm_solve", "dc_solve",
           "constrained_sgl_solve", "truncate_to_budget"]


@dataclass
class AgmState:
    """Terminal state of an accelerated gradient run."""

    x_cur: np.ndarray
    x_prev: np.ndarray
    alpha_cur: float
    alpha_prev: float
    lipschitz: float
    t: int
    converged: bool


@dataclass
class DcTrace:
    """Objective history of the outer DC loop (non-increasing)."""

    objectives: list = field(default_factory=list)
    iterates_kept: list | None = None
    converged: bool = False


def agm_solve(inst, budget, restriction=None, cfg=None, warm=None):
    """Minimize 0.5||Ax - y||^2 over the (restricted) two-ball intersection.

    Projected accelerated gradient with backtracking line search: the step
    size 1/L is halved (L doubled) until the quadratic upper model at the
    extrapolation point holds.  Returns the final iterate and the run state;
    ``converged=False`` means the iteration cap was hit.
    """
    if budget.kind != "radius":
        raise ValueError("agm_solve needs a radius budget")
    s1, s2 = float(budget.s1), float(budget.s2)
    part = inst.partition

    def project(z):
        if restriction is None:
            return sglp(z, s1, s2, part, cfg).x
        return restricted_sglp(z, s1, s2, restriction.t1, restriction.t3,
                               part, cfg).x

    x_prev = np.zeros(inst.p) if warm is None else np.asarray(warm, float).copy()
    x = project(x_prev)
    a_prev, a_cur = 0.0, 1.0
    L = cfg.initial_lipschitz
    f_x = objective(inst, x)
    converged = False
    t = 0
    for t in range(1, cfg.agm_max_iter + 1):
        beta = (a_prev - 1.0) / a_cur
        u = x + beta * (x - x_prev)
        ru = inst.A @ u - inst.y
        fu = 0.5 * float(ru @ ru)
        grad = inst.A.T @ ru
        for _ in range(100):
            x_new = project(u - grad / L)
            d = x_new - u
            f_new = objective(inst, x_new)
            if f_new <= fu + float(grad @ d) + 0.5 * L * float(d @ d) + 1e-12 * (1 + abs(fu)):
                break
            L *= 2.0
        a_prev, a_cur = a_cur, 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * a_cur * a_cur))
        x_prev, x = x, x_new
        if abs(f_new - f_x) <= cfg.agm_rel_tol * (1.0 + abs(f_x)):
            f_x = f_new
            converged = True
            break
        f_x = f_new
    state = AgmState(x_cur=x, x_prev=x_prev, alpha_cur=a_cur,
                     alpha_prev=a_prev, lipschitz=L, t=t, converged=converged)
    return x, state


def constrained_sgl_solve(inst, budget, cfg):
    """Convex baseline: least squares under the two ball constraints."""
    x, _ = agm_solve(inst, budget, restriction=None, cfg=cfg)
    return x


def truncate_to_budget(x, budget, partition):
    """Nearest count-feasible point by hard truncation.

    Keeps the ``s2`` groups with the largest norms, then the ``s1`` largest
    entries (in magnitude) inside them, zeroing everything else.  The result
    satisfies both count constraints exactly, which makes it a valid warm
    start for ``dc_solve`` (e.g. a truncated convex-relaxation solution).
    """
    if budget.kind != "count":
        raise ValueError("truncate_to_budget needs a count budget")
    x = np.asarray(x, dtype=float).copy()
    if x.size != partition.p:
        raise ValueError(f"x has length {x.size}, expected {partition.p}")
    s1, s2 = int(budget.s1), int(budget.s2)
    norms = partition.group_norms(x)
    keep = np.argsort(-norms, kind="stable")[:s2]
    x[~np.isin(partition.labels, keep)] = 0.0
    nz = np.flatnonzero(x)
    if nz.size > s1:
        order = nz[np.argsort(-np.abs(x[nz]), kind="stable")]
        x[order[s1:]] = 0.0
    return x


def _strict_support(x, partition, tau):
    """Supports for the DC linearization, with the boundary |x| == tau
    counted as saturated so boundary iterates can escape the constraint.
    A relative slack absorbs round-off from iterates that land on the
    boundary through the projection."""
    edge = tau * (1.0 - 1e-9)
    t1 = np.abs(x) < edge
    t2 = partition.group_norms(x) < edge
    t3 = np.isin(partition.labels, np.flatnonzero(t2))
    return t1, t2, t3


def _reduced_instance(inst, keep):
    labels = inst.partition.labels[keep]
    ids = np.unique(labels)
    remap = np.full(inst.partition.n_groups, -1, dtype=np.intp)
    remap[ids] = np.arange(ids.size)
    part = GroupPartition.from_labels(remap[labels])
    return ProblemInstance(inst.A[:, keep], inst.y, part)


def _dc_subproblem(inst, t1, t2, t3, r1, r2, cfg, warm):
    """Solve one linearized subproblem; handles degenerate zero radii.

    r1 == 0 pins every t1 coordinate to zero (unconstrained least squares
    on the saturated features); r2 == 0 pins the t3 groups and leaves an
    L1-only restricted problem on t1 \\ t3.
    """
    p = inst.p
    tiny = 1e-12
    if r1 < -cfg.feas_tol or r2 < -cfg.feas_tol:
        raise RuntimeError("linearized subproblem infeasible: previous DC "
                           "iterate violates the surrogate constraints")
    t1_idx = np.flatnonzero(t1)
    t3_idx = np.flatnonzero(t3)
    if r1 <= tiny:
        x = np.zeros(p)
        free = np.flatnonzero(~t1)
        if free.size:
            coef, _, _, _ = np.linalg.lstsq(inst.A[:, free], inst.y,
                                            rcond=None)
            x[free] = coef
        return x
    if r2 <= tiny and t3_idx.size:
        keep = np.flatnonzero(~t3)
        red = _reduced_instance(inst, keep)
        pos = np.full(p, -1, dtype=np.intp)
        pos[keep] = np.arange(keep.size)
        ss = SupportSets(t1=pos[t1_idx[~np.isin(t1_idx, t3_idx)]],
                         t2=np.zeros(0, dtype=np.intp),
                         t3=np.zeros(0, dtype=np.intp))
        budget = SparsityBudget(r1, max(r2, tiny), kind="radius")
        xr, _ = agm_solve(red, budget, restriction=ss, cfg=cfg,
                          warm=warm[keep])
        x = np.zeros(p)
        x[keep] = xr
        return x
    ss = SupportSets(t1=t1_idx, t2=np.flatnonzero(t2), t3=t3_idx)
    budget = SparsityBudget(r1, max(r2, tiny), kind="radius")
    x, _ = agm_solve(inst, budget, restriction=ss, cfg=cfg, warm=warm)
    return x


def dc_solve(inst, budget, tau, cfg, init=None, keep_iterates=False):
    """Difference-of-convex loop for the count-constrained model.

    Starts from zero (feasible for any positive budget) unless ``init`` is
    given, solves the linearized subproblem each outer iteration and stops
    once the objective no longer decreases meaningfully.  The returned trace
    has a non-increasing objective sequence by construction.
    """
    if budget.kind != "count":
        raise ValueError("dc_solve needs a count budget")
    budget.validate_for(inst.partition)
    part = inst.partition
    t = tau.tau
    p, ng = inst.p, part.n_groups
    s1, s2 = int(budget.s1), int(budget.s2)

    x = np.zeros(p) if init is None else np.asarray(init, dtype=float).copy()
    f = objective(inst, x)
    trace = DcTrace(objectives=[f],
                    iterates_kept=[x.copy()] if keep_iterates else None)
    for _ in range(cfg.dc_max_iter):
        t1, t2, t3 = _strict_support(x, part, t)
        r1 = t * (s1 - (p - int(t1.sum())))
        r2 = t * (s2 - (ng - int(t2.sum())))
        x_new = _dc_subproblem(inst, t1, t2, t3, r1, r2, cfg, warm=x)
        f_new = objective(inst, x_new)
        if f_new > f:
            # numerical stall: keep the previous iterate
            trace.converged = True
            break
        x, decrease, f = x_new, f - f_new, f_new
        trace.objectives.append(f)
        if trace.iterates_kept is not None:
            trace.iterates_kept.append(x.copy())
        if decrease <= cfg.dc_rel_tol * (1.0 + abs(f)):
            trace.converged = True
            break
    return x, trace
