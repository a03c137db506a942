"""Selection-quality metrics, classification accuracy and cross-validation
for tuning the sparsity budgets."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .model import ProblemInstance, SparsityBudget, objective
from .solvers import agm_solve, dc_solve

__all__ = ["SelectionMetrics", "CvPlan", "compute_metrics", "cross_validate",
           "classify_accuracy", "write_score_table"]


@dataclass
class SelectionMetrics:
    estimation_error: float
    prediction_error: float
    group_precision: float
    group_recall: float
    n_features: int
    n_groups: int


@dataclass
class CvPlan:
    """Grid and fold layout for budget tuning.

    ``folds="loo"`` means leave-one-out.  When ``s1_relative`` is set, the
    ``s1_grid`` entries are multipliers of the ``s2`` value under trial
    (the grid scheme used for the count-constrained model).  ``budget_kind``
    forces the budget kind of the grid points; it is required when the
    fitted method is a custom callable.
    """

    s2_grid: list
    s1_grid: list
    folds: int | str = 5
    metric: str = "prediction_error"
    s1_relative: bool = False
    budget_kind: str | None = None

    def __post_init__(self):
        if not self.s1_grid or not self.s2_grid:
            raise ValueError("grids must be non-empty")
        if self.metric not in ("prediction_error", "accuracy"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.folds != "loo" and int(self.folds) < 2:
            raise ValueError("need at least 2 folds")
        if self.budget_kind not in (None, "count", "radius"):
            raise ValueError(f"unknown budget kind {self.budget_kind!r}")


def _selected_groups(x, partition, tau):
    # selection threshold reuses tau: solver iterates are dense up to
    # tolerance, so exact-zero tests would be meaningless
    return np.flatnonzero(partition.group_norms(x) > tau)


def compute_metrics(xhat, dataset, tau):
    """Estimation/prediction errors and group precision/recall of a fit."""
    if dataset.truth is None:
        raise ValueError("dataset has no ground truth")
    xhat = np.asarray(xhat, dtype=float)
    part = dataset.train.partition
    t = tau.tau
    est = float(np.sum((xhat - dataset.truth) ** 2))
    resid = dataset.test.A @ xhat - dataset.test.y
    pred = float(resid @ resid)
    sel = set(_selected_groups(xhat, part, t))
    true = set(_selected_groups(dataset.truth, part, t))
    hit = len(sel & true)
    if sel:
        precision = hit / len(sel)
    else:
        precision = 1.0 if not true else 0.0
    recall = hit / len(true) if true else 1.0
    n_features = int(np.sum(np.abs(xhat) > t))
    return SelectionMetrics(estimation_error=est, prediction_error=pred,
                            group_precision=precision, group_recall=recall,
                            n_features=n_features, n_groups=len(sel))


def classify_accuracy(xhat, inst):
    """Sign-rule accuracy on +/-1 labels; a zero prediction is incorrect."""
    labels = np.unique(inst.y)
    if not np.isin(labels, (-1.0, 1.0)).all():
        raise ValueError("labels must be -1/+1")
    pred = inst.A @ np.asarray(xhat, dtype=float)
    return float(np.mean(pred * inst.y > 0))


def _fold_indices(n, folds):
    if folds == "loo":
        return [np.array([i]) for i in range(n)]
    folds = int(folds)
    if folds > n:
        raise ValueError(f"{folds} folds but only {n} samples")
    return [np.arange(n)[i::folds] for i in range(folds)]


def _make_budget(method, kind, s1, s2, p, n_groups):
    if kind is None:
        if callable(method):
            raise ValueError("callable methods need an explicit "
                             "CvPlan.budget_kind")
        kind = "count" if method == "dc" else "radius"
    if kind == "count":
        s2 = int(min(s2, n_groups))
        s1 = int(min(s1, p))
        return SparsityBudget(s1, s2, kind="count")
    return SparsityBudget(float(s1), float(s2), kind="radius")


def _fit(method, inst, budget, tau, cfg):
    if callable(method):
        return np.asarray(method(inst, budget, tau, cfg), dtype=float)
    if method == "dc":
        x, _ = dc_solve(inst, budget, tau, cfg)
    elif method == "constrained_sgl":
        x, _ = agm_solve(inst, budget, cfg=cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return x


def cross_validate(dataset, plan, method, tau, cfg):
    """Grid search by fold-averaged score over the training half.

    Returns the winning budget and the full score table (one row per grid
    point and fold).  Prediction error is minimized, accuracy maximized;
    ties go to the smaller (s2, s1).
    """
    train = dataset.train
    part = train.partition
    folds = _fold_indices(train.n, plan.folds)
    all_idx = np.arange(train.n)
    table = []
    summary = {}
    for s2 in plan.s2_grid:
        for raw_s1 in plan.s1_grid:
            s1 = raw_s1 * s2 if plan.s1_relative else raw_s1
            scores = []
            for k, held in enumerate(folds):
                keep = np.setdiff1d(all_idx, held)
                fit_inst = ProblemInstance(train.A[keep], train.y[keep], part)
                budget = _make_budget(method, plan.budget_kind, s1, s2,
                                      part.p, part.n_groups)
                x = _fit(method, fit_inst, budget, tau, cfg)
                if plan.metric == "accuracy":
                    held_inst = ProblemInstance(train.A[held], train.y[held],
                                                part)
                    score = classify_accuracy(x, held_inst)
                else:
                    r = train.A[held] @ x - train.y[held]
                    score = float(r @ r) / held.size
                scores.append(score)
                table.append({"s1": s1, "s2": s2, "fold": k, "score": score})
            summary[(s2, s1)] = float(np.mean(scores))
    sign = -1.0 if plan.metric == "accuracy" else 1.0
    best_s2, best_s1 = min(summary, key=lambda k: (sign * summary[k], k))
    best = _make_budget(method, plan.budget_kind, best_s1, best_s2,
                        part.p, part.n_groups)
    return best, table


def write_score_table(table, path):
    """Export cross-validation scores as CSV (s1,s2,fold,score)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["s1", "s2", "fold", "score"])
        writer.writeheader()
        writer.writerows(table)
