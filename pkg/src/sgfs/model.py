"""Domain types and objective/constraint evaluation shared by all solvers.

The model under study is least squares with two-level sparsity control: a
budget ``s1`` on the number of nonzero features and a budget ``s2`` on the
number of groups containing a nonzero entry.  Group structure is a
non-overlapping partition of the feature indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupPartition",
    "ProblemInstance",
    "SparsityBudget",
    "TruncationParam",
    "SupportSets",
    "SolverConfig",
    "objective",
    "group_norm",
    "truncated_l1_counts",
    "support_sets",
    "l0_oracle",
]


class GroupPartition:
    """Non-overlapping groups covering all ``p`` feature indices.

    Parameters
    ----------
    groups : sequence of index sequences
        Ordered list of 0-based feature index sets. Groups must be
        non-empty, pairwise disjoint and jointly cover ``{0..p-1}``.
    """

    def __init__(self, groups):
        self.groups = [np.asarray(sorted(g), dtype=np.intp) for g in groups]
        if not self.groups:
            raise ValueError("partition needs at least one group")
        sizes = [g.size for g in self.groups]
        if min(sizes) == 0:
            raise ValueError("empty group in partition")
        p = sum(sizes)
        labels = np.full(p, -1, dtype=np.intp)
        for gid, idx in enumerate(self.groups):
            if idx.min() < 0 or idx.max() >= p:
                raise ValueError("group indices must partition {0..p-1}")
            if np.any(labels[idx] >= 0):
                raise ValueError("groups overlap")
            labels[idx] = gid
        # coverage follows from disjointness + total size == p
        self.p = p
        self.labels = labels

    @classmethod
    def from_labels(cls, labels):
        """Build a partition from a per-feature group-id array."""
        labels = np.asarray(labels, dtype=np.intp)
        ids = np.unique(labels)
        if ids[0] != 0 or ids[-1] != ids.size - 1:
            raise ValueError("non-contiguous group ids")
        return cls([np.flatnonzero(labels == i) for i in ids])

    @classmethod
    def contiguous(cls, p, n_groups):
        """Split ``{0..p-1}`` into ``n_groups`` equal contiguous blocks."""
        if p % n_groups != 0:
            raise ValueError(f"p={p} not divisible by n_groups={n_groups}")
        size = p // n_groups
        return cls([range(i * size, (i + 1) * size) for i in range(n_groups)])

    @property
    def n_groups(self):
        return len(self.groups)

    def group_norms(self, x):
        """Euclidean norm of each group block, as a length-|G| vector."""
        return np.sqrt(np.bincount(self.labels, weights=x * x,
                                   minlength=self.n_groups))

    def group_l1(self, x):
        """L1 norm of each group block."""
        return np.bincount(self.labels, weights=np.abs(x),
                           minlength=self.n_groups)

    def expand(self, per_group):
        """Broadcast a per-group vector to a per-feature vector."""
        return np.asarray(per_group)[self.labels]

    def __eq__(self, other):
        return (isinstance(other, GroupPartition)
                and self.p == other.p
                and np.array_equal(self.labels, other.labels))

    def __repr__(self):
        return f"GroupPartition(p={self.p}, n_groups={self.n_groups})"


@dataclass
class ProblemInstance:
    """Least-squares data: design matrix ``A`` (n x p), response ``y`` (n)."""

    A: np.ndarray
    y: np.ndarray
    partition: GroupPartition

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.A.ndim != 2:
            raise ValueError("A must be a 2-D matrix")
        n, p = self.A.shape
        if p != self.partition.p:
            raise ValueError(f"A has {p} columns, partition covers "
                             f"{self.partition.p} features")
        if n != self.y.size:
            raise ValueError(f"A has {n} rows but y has {self.y.size} entries")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def p(self):
        return self.A.shape[1]


@dataclass(frozen=True)
class SparsityBudget:
    """Two-level sparsity budget.

    ``kind="count"`` is the combinatorial model (integer feature/group
    counts); ``kind="radius"`` is the convex relaxation (real L1 and
    group-norm ball radii).  The two are deliberately kept distinct.
    """

    s1: float
    s2: float
    kind: str = "count"
    allow_s1_lt_s2: bool = False

    def __post_init__(self):
        if self.kind not in ("count", "radius"):
            raise ValueError(f"unknown budget kind {self.kind!r}")
        if self.kind == "count":
            if self.s1 != int(self.s1) or self.s2 != int(self.s2):
                raise ValueError("count budgets must be integers")
            if self.s2 < 1:
                raise ValueError("need at least one group in the budget")
            if self.s1 < self.s2 and not self.allow_s1_lt_s2:
                raise ValueError("s1 < s2: a selected group needs at least "
                                 "one feature (set allow_s1_lt_s2 to bypass)")
        else:
            if self.s1 <= 0 or self.s2 <= 0:
                raise ValueError("radii must be positive")

    def validate_for(self, partition):
        """Check the count budget against a concrete partition."""
        if self.kind == "count":
            if self.s2 > partition.n_groups:
                raise ValueError("s2 exceeds the number of groups")
            if self.s1 > partition.p:
                raise ValueError("s1 exceeds the number of features")


@dataclass(frozen=True)
class TruncationParam:
    """Truncation level of the capped-L1 surrogate min(|z|/tau, 1)."""

    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")


@dataclass(frozen=True)
class SupportSets:
    """Index sets driving the linearized constraints at a given iterate.

    ``t1``: features with small magnitude, ``t2``: groups with small norm,
    ``t3``: all features belonging to groups in ``t2``.
    """

    t1: np.ndarray
    t2: np.ndarray
    t3: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t1", np.asarray(self.t1, dtype=np.intp))
        object.__setattr__(self, "t2", np.asarray(self.t2, dtype=np.intp))
        object.__setattr__(self, "t3", np.asarray(self.t3, dtype=np.intp))
        if not np.isin(self.t3, self.t1).all():
            raise ValueError("t3 must be a subset of t1")


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps shared by the solver stack."""

    dc_max_iter: int = 50
    dc_rel_tol: float = 1e-5
    agm_max_iter: int = 10000
    agm_rel_tol: float = 1e-6
    bisect_tol: float = 1e-7
    feas_tol: float = 1e-6
    initial_lipschitz: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.dc_rel_tol, self.agm_rel_tol, self.bisect_tol,
               self.feas_tol, self.initial_lipschitz) <= 0:
            raise ValueError("tolerances must be positive")
        if min(self.dc_max_iter, self.agm_max_iter) < 1:
            raise ValueError("iteration caps must be >= 1")


def objective(inst, x):
    """Least-squares objective 0.5 * ||A x - y||_2^2."""
    x = np.asarray(x, dtype=float)
    if x.size != inst.p:
        raise ValueError(f"x has length {x.size}, expected {inst.p}")
    r = inst.A @ x - inst.y
    return 0.5 * float(r @ r)


def group_norm(x, partition):
    """Sum of Euclidean norms of the group blocks of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.size != partition.p:
        raise ValueError(f"x has length {x.size}, expected {partition.p}")
    return float(partition.group_norms(x).sum())


def truncated_l1_counts(x, partition, tau):
    """Capped-L1 constraint values (feature-level sum, group-level sum)."""
    x = np.asarray(x, dtype=float)
    if x.size != partition.p:
        raise ValueError(f"x has length {x.size}, expected {partition.p}")
    t = tau.tau
    feat = float(np.minimum(np.abs(x) / t, 1.0).sum())
    grp = float(np.minimum(partition.group_norms(x) / t, 1.0).sum())
    return feat, grp


def support_sets(x, partition, tau):
    """Small-magnitude supports: t1 = {|x_i| <= tau}, t2 = {||x_Gi|| <= tau},
    t3 = features of groups in t2."""
    x = np.asarray(x, dtype=float)
    t = tau.tau
    t1 = np.flatnonzero(np.abs(x) <= t)
    t2 = np.flatnonzero(partition.group_norms(x) <= t)
    t3 = np.flatnonzero(np.isin(partition.labels, t2))
    return SupportSets(t1=t1, t2=t2, t3=t3)


def _support_objective(A, y, support):
    """Least-squares objective restricted to the given feature support."""
    if len(support) == 0:
        return 0.5 * float(y @ y), np.zeros(0)
    coef, _, _, _ = np.linalg.lstsq(A[:, support], y, rcond=None)
    r = A[:, support] @ coef - y
    return 0.5 * float(r @ r), coef


def l0_oracle(inst, budget, size_limit=20):
    """Exact global minimizer of the combinatorial model by enumeration.

    Enumerates every feature support satisfying both count constraints,
    solves the restricted least squares and returns the best solution.
    Ties between equal-objective supports go to the lexicographically
    smallest support.  Guarded to tiny instances (``p <= size_limit``).
    """
    if budget.kind != "count":
        raise ValueError("l0_oracle needs a count budget")
    budget.validate_for(inst.partition)
    p = inst.p
    if p > size_limit:
        raise ValueError(f"p={p} exceeds the enumeration guard ({size_limit})")
    labels = inst.partition.labels
    s1, s2 = int(budget.s1), int(budget.s2)

    best_obj = np.inf
    best_support = ()
    best_coef = np.zeros(0)
    for k in range(0, s1 + 1):
        for support in itertools.combinations(range(p), k):
            if len(set(labels[list(support)])) > s2:
                continue
            obj, coef = _support_objective(inst.A, inst.y, list(support))
            if (not np.isfinite(best_obj)
                    or obj < best_obj - 1e-12 * (1.0 + abs(best_obj))):
                best_obj, best_support, best_coef = obj, support, coef
            elif (abs(obj - best_obj) <= 1e-12 * (1.0 + abs(best_obj))
                  and support < best_support):
                best_support, best_coef = support, coef
    x = np.zeros(p)
    x[list(best_support)] = best_coef
    return x
