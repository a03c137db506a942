"""Reference projections onto the two-ball intersection: scaled-form ADMM
and Dykstra's alternating projection with correction terms.

These are correctness oracles and benchmark comparators; correctness is
preferred over speed (large default iteration caps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .projection import group_ball_projection, l1_ball_projection

__all__ = ["StopRule", "AdmmState", "DykstraState", "admm_project",
           "dykstra_project"]

# gap used by the "stop once close to a known optimum" benchmark protocol
TARGET_GAP = 1e-3


@dataclass
class StopRule:
    """Termination options shared by both baselines.

    ``target_objective``: stop once the objective is within 1e-3 of it
    (benchmark timing mode).  ``rel_tol``: stop when the relative objective
    change between iterations falls below it.  ``x_tol``: optional absolute
    stagnation threshold on the iterate change (long-run oracle mode).
    """

    target_objective: float | None = None
    rel_tol: float = 1e-7
    max_iter: int = 100000
    x_tol: float | None = None


@dataclass
class AdmmState:
    x: np.ndarray
    u: np.ndarray
    w: np.ndarray
    lambda_mult: np.ndarray
    eta_mult: np.ndarray
    rho: float
    t: int
    converged: bool


@dataclass
class DykstraState:
    x: np.ndarray
    y_aux: np.ndarray
    p_corr: np.ndarray
    q_corr: np.ndarray
    t: int
    converged: bool


def _objective(x, v):
    d = x - v
    return 0.5 * float(d @ d)


def _stopped(f, f_prev, stop, residual=0.0, scale=1.0):
    if stop.target_objective is not None:
        return abs(f - stop.target_objective) <= TARGET_GAP
    # f_prev == 0 (feasible input) stops immediately since f stays 0;
    # the residual guard keeps ADMM from stopping while grossly infeasible
    return (abs(f_prev - f) <= stop.rel_tol * abs(f_prev)
            and residual <= 1e-5 * scale)


def admm_project(v, s1, s2, partition, stop=None):
    """Scaled-form ADMM for the two-ball projection.

    Splitting variables ``u`` (L1 ball) and ``w`` (group ball) are tied to
    ``x`` by vector multipliers.  The penalty ``rho`` doubles whenever the
    primal residual runs 10x ahead of the dual residual (capped at 2^16);
    scaled multipliers are rescaled accordingly.
    """
    if s1 <= 0 or s2 <= 0:
        raise ValueError("radii must be positive")
    if stop is None:
        stop = StopRule()
    v = np.asarray(v, dtype=float)
    x = v.copy()
    u = v.copy()
    w = v.copy()
    lam = np.zeros_like(v)
    eta = np.zeros_like(v)
    rho = 1.0
    scale = 1.0 + float(np.linalg.norm(v))
    f_prev = _objective(x, v)
    converged = False
    t = 0
    for t in range(1, stop.max_iter + 1):
        x_old = x
        x = (v + rho * (u + lam + w + eta)) / (1.0 + 2.0 * rho)
        w = group_ball_projection(x - eta, s2, partition)
        u = l1_ball_projection(x - lam, s1)
        lam = lam + u - x
        eta = eta + w - x
        f = _objective(x, v)
        primal = max(float(np.linalg.norm(u - x)), float(np.linalg.norm(w - x)))
        if _stopped(f, f_prev, stop, residual=primal, scale=scale):
            converged = True
            break
        if (stop.x_tol is not None and primal <= 1e-5 * scale
                and np.abs(x - x_old).max() <= stop.x_tol):
            converged = True
            break
        f_prev = f
        dual = rho * float(np.linalg.norm(x - x_old))
        if primal > 10.0 * dual and rho < 2.0 ** 16:
            rho *= 2.0
            lam /= 2.0
            eta /= 2.0
    state = AdmmState(x=x, u=u, w=w, lambda_mult=lam, eta_mult=eta,
                      rho=rho, t=t, converged=converged)
    return x, state


def dykstra_project(v, s1, s2, partition, stop=None):
    """Dykstra's alternating projections with correction terms.

    Unlike plain alternating projection, the corrections make the limit the
    exact Euclidean projection onto the intersection.
    """
    if s1 <= 0 or s2 <= 0:
        raise ValueError("radii must be positive")
    if stop is None:
        stop = StopRule()
    v = np.asarray(v, dtype=float)
    x = v.copy()
    p_corr = np.zeros_like(v)
    q_corr = np.zeros_like(v)
    y = x
    f_prev = _objective(x, v)
    converged = False
    t = 0
    for t in range(1, stop.max_iter + 1):
        x_old = x
        y = group_ball_projection(x + p_corr, s2, partition)
        p_corr = x + p_corr - y
        x = l1_ball_projection(y + q_corr, s1)
        q_corr = y + q_corr - x
        f = _objective(x, v)
        if _stopped(f, f_prev, stop):
            converged = True
            break
        if stop.x_tol is not None and np.abs(x - x_old).max() <= stop.x_tol:
            converged = True
            break
        f_prev = f
    state = DykstraState(x=x, y_aux=y, p_corr=p_corr, q_corr=q_corr,
                         t=t, converged=converged)
    return x, state
