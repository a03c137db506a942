"""Scikit-learn style estimators wrapping the solver stack.

``DCSparseGroupSelector`` fits the count-constrained nonconvex model (pick
at most ``n_features`` features in at most ``n_groups`` groups);
``ConstrainedSparseGroupLasso`` fits its convex two-ball relaxation.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .model import (GroupPartition, ProblemInstance, SolverConfig,
                    SparsityBudget, TruncationParam)
from .solvers import constrained_sgl_solve, dc_solve

__all__ = ["DCSparseGroupSelector", "ConstrainedSparseGroupLasso"]


def _partition_from(groups, p):
    if groups is None:
        return GroupPartition([range(p)])
    if isinstance(groups, GroupPartition):
        return groups
    groups = np.asarray(groups)
    if groups.ndim == 1 and groups.size == p:
        return GroupPartition.from_labels(groups)
    return GroupPartition(groups)


class _SgfsBase(RegressorMixin, BaseEstimator):

    def _validate(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        partition = _partition_from(self.groups, X.shape[1])
        return ProblemInstance(X, y, partition)

    def _config(self):
        return SolverConfig(dc_max_iter=self.dc_max_iter,
                            dc_rel_tol=self.dc_rel_tol,
                            agm_max_iter=self.agm_max_iter,
                            agm_rel_tol=self.agm_rel_tol)

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        return X @ self.coef_


class ConstrainedSparseGroupLasso(_SgfsBase):
    """Least squares subject to ``||x||_1 <= s1`` and ``||x||_G <= s2``.

    Parameters
    ----------
    s1, s2 : float
        Radii of the L1 ball and the group-norm ball.
    groups : array of per-feature group ids, list of index lists, or
        GroupPartition.  ``None`` treats all features as one group.
    """

    def __init__(self, s1=1.0, s2=1.0, groups=None, dc_max_iter=50,
                 dc_rel_tol=1e-5, agm_max_iter=10000, agm_rel_tol=1e-6):
        self.s1 = s1
        self.s2 = s2
        self.groups = groups
        self.dc_max_iter = dc_max_iter
        self.dc_rel_tol = dc_rel_tol
        self.agm_max_iter = agm_max_iter
        self.agm_rel_tol = agm_rel_tol

    def fit(self, X, y):
        inst = self._validate(X, y)
        budget = SparsityBudget(float(self.s1), float(self.s2), kind="radius")
        self.coef_ = constrained_sgl_solve(inst, budget, self._config())
        self.n_features_in_ = inst.p
        return self


class DCSparseGroupSelector(_SgfsBase):
    """Nonconvex two-level sparse selector fitted by DC programming.

    Parameters
    ----------
    n_features : int
        Budget on the number of selected features.
    n_groups : int
        Budget on the number of selected groups.
    tau : float
        Truncation level of the capped-L1 surrogate; entries above it count
        as selected.
    """

    def __init__(self, n_features=1, n_groups=1, tau=0.01, groups=None,
                 dc_max_iter=50, dc_rel_tol=1e-5, agm_max_iter=10000,
                 agm_rel_tol=1e-6):
        self.n_features = n_features
        self.n_groups = n_groups
        self.tau = tau
        self.groups = groups
        self.dc_max_iter = dc_max_iter
        self.dc_rel_tol = dc_rel_tol
        self.agm_max_iter = agm_max_iter
        self.agm_rel_tol = agm_rel_tol

    def fit(self, X, y):
        inst = self._validate(X, y)
        budget = SparsityBudget(int(self.n_features), int(self.n_groups),
                                kind="count")
        coef, trace = dc_solve(inst, budget, TruncationParam(self.tau),
                               self._config())
        self.coef_ = coef
        self.trace_ = trace
        self.selected_features_ = np.flatnonzero(np.abs(coef) > self.tau)
        self.selected_groups_ = np.flatnonzero(
            inst.partition.group_norms(coef) > self.tau)
        self.n_features_in_ = inst.p
        return self
