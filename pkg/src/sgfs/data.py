"""Synthetic instance generators and CSV ingestion with group structure.

All generators are deterministic functions of (spec, seed); the RNG is
numpy's ``default_rng`` (PCG64), so replications are reproducible across
platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GroupPartition, ProblemInstance, SparsityBudget

__all__ = ["ProjBenchSpec", "SyntheticSpec", "Dataset",
           "gen_projection_instance", "gen_synthetic_dataset",
           "load_csv_dataset", "save_csv_dataset"]


@dataclass(frozen=True)
class ProjBenchSpec:
    """Projection benchmark instance family.

    Entries of ``v`` are uniform on ``value_range``; 10 equal contiguous
    groups; the group radius is ``5 * log(p)`` and the L1 radius
    ``sqrt(10)/2`` times that.  ``log_base`` selects the logarithm used
    (default natural log).
    """

    p: int
    seed: int = 0
    group_count: int = 10
    value_range: tuple = (-50.0, 50.0)
    log_base: float = math.e

    def __post_init__(self):
        if self.p % self.group_count != 0:
            raise ValueError(f"p={self.p} not divisible by "
                             f"group_count={self.group_count}")
        if self.log_base <= 1:
            raise ValueError("log_base must exceed 1")

    @property
    def s2(self):
        return 5.0 * math.log(self.p, self.log_base)

    @property
    def s1(self):
        return 0.5 * math.sqrt(10.0) * self.s2


@dataclass(frozen=True)
class SyntheticSpec:
    """Regression benchmark: 60 x 100 Gaussian design, 10 groups, truth
    supported on 4 groups with 1-5 nonzeros each, noise sd 0.5."""

    seed: int = 0
    n: int = 60
    p: int = 100
    group_count: int = 10
    active_groups: int = 4
    noise_sd: float = 0.5

    def __post_init__(self):
        if self.p % self.group_count != 0:
            raise ValueError("p must be divisible by group_count")
        if self.active_groups > self.group_count:
            raise ValueError("active_groups exceeds group_count")
        if self.n % 2 != 0:
            raise ValueError("n must be even for the half/half split")


@dataclass
class Dataset:
    """Train/test halves sharing a partition, plus the ground truth."""

    train: ProblemInstance
    test: ProblemInstance
    truth: np.ndarray | None = None

    def __post_init__(self):
        if self.train.partition != self.test.partition:
            raise ValueError("train/test must share the group partition")
        if self.truth is not None and self.truth.size != self.train.p:
            raise ValueError("truth length differs from feature count")


def gen_projection_instance(spec):
    """Seeded benchmark vector plus its radius budget and partition."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.value_range
    v = rng.uniform(lo, hi, size=spec.p)
    partition = GroupPartition.contiguous(spec.p, spec.group_count)
    budget = SparsityBudget(spec.s1, spec.s2, kind="radius")
    return v, budget, partition


def gen_synthetic_dataset(spec):
    """Seeded regression dataset split into equal train/test halves."""
    rng = np.random.default_rng(spec.seed)
    A = rng.standard_normal((spec.n, spec.p))
    partition = GroupPartition.contiguous(spec.p, spec.group_count)
    size = spec.p // spec.group_count
    active = rng.choice(spec.group_count, size=spec.active_groups,
                        replace=False)
    x0 = np.zeros(spec.p)
    for g in active:
        t = int(rng.integers(1, 6))
        pos = rng.choice(size, size=t, replace=False) + g * size
        x0[pos] = rng.standard_normal(t)
    y = A @ x0 + spec.noise_sd * rng.standard_normal(spec.n)
    half = spec.n // 2
    train = ProblemInstance(A[:half], y[:half], partition)
    test = ProblemInstance(A[half:], y[half:], partition)
    return Dataset(train=train, test=test, truth=x0)


def _load_matrix(path, header):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if header:
        lines = lines[1:]
    for ln in lines:
        rows.append([float(tok) for tok in ln.split(",")])
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"ragged rows in {path}")
    return np.asarray(rows, dtype=float)


def load_csv_dataset(matrix_path, response_path, groups_path, header=False):
    """Read a (matrix, response, groups) CSV triple into an instance.

    The matrix holds one sample per row; the response one value per line;
    the groups file one 0-based group id per feature per line, with ids
    forming a contiguous range.
    """
    A = _load_matrix(matrix_path, header)
    y = np.loadtxt(response_path, dtype=float, ndmin=1)
    labels = np.loadtxt(groups_path, dtype=int, ndmin=1)
    if labels.size != A.shape[1]:
        raise ValueError(f"groups file lists {labels.size} features but the "
                         f"matrix has {A.shape[1]} columns")
    if y.size != A.shape[0]:
        raise ValueError(f"response has {y.size} values but the matrix has "
                         f"{A.shape[0]} rows")
    try:
        partition = GroupPartition.from_labels(labels)
    except ValueError as exc:
        raise ValueError(f"bad groups file {groups_path}: {exc}") from exc
    return ProblemInstance(A, y, partition)


def save_csv_dataset(inst, matrix_path, response_path, groups_path):
    """Write an instance back to the CSV triple format."""
    np.savetxt(matrix_path, inst.A, delimiter=",", fmt="%.17g")
    np.savetxt(response_path, inst.y, fmt="%.17g")
    np.savetxt(groups_path, inst.partition.labels, fmt="%d")
