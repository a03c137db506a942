"""Sparse group feature selection: two-level sparsity-constrained least
squares solved by DC programming, with an exact fast projection onto the
intersection of an L1 ball and a group-norm ball at its core."""

__version__ = "0.1.0"

from .baselines import StopRule, admm_project, dykstra_project
from .data import (Dataset, ProjBenchSpec, SyntheticSpec,
                   gen_projection_instance, gen_synthetic_dataset,
                   load_csv_dataset, save_csv_dataset)
from .estimators import ConstrainedSparseGroupLasso, DCSparseGroupSelector
from .evaluation import (CvPlan, SelectionMetrics, classify_accuracy,
                         compute_metrics, cross_validate, write_score_table)
from .model import (GroupPartition, ProblemInstance, SolverConfig,
                    SparsityBudget, SupportSets, TruncationParam, group_norm,
                    l0_oracle, objective, support_sets, truncated_l1_counts)
from .projection import (DualPair, ProjectionOutcome, compute_x_from_duals,
                         eta_from_lambda, group_ball_projection,
                         l1_ball_projection, restricted_sglp, s1_of_lambda,
                         sglp, soft_threshold)
from .solvers import (AgmState, DcTrace, agm_solve, constrained_sgl_solve,
                      dc_solve, truncate_to_budget)

__all__ = [
    "AgmState", "ConstrainedSparseGroupLasso", "CvPlan", "DCSparseGroupSelector",
    "Dataset", "DcTrace", "DualPair", "GroupPartition", "ProblemInstance",
    "ProjBenchSpec", "ProjectionOutcome", "SelectionMetrics", "SolverConfig",
    "SparsityBudget", "StopRule", "SupportSets", "SyntheticSpec",
    "TruncationParam", "admm_project", "agm_solve", "classify_accuracy",
    "compute_metrics", "compute_x_from_duals", "constrained_sgl_solve",
    "cross_validate", "dc_solve", "dykstra_project", "eta_from_lambda",
    "gen_projection_instance", "gen_synthetic_dataset", "group_ball_projection",
    "group_norm", "l0_oracle", "l1_ball_projection", "load_csv_dataset",
    "objective", "restricted_sglp", "s1_of_lambda", "save_csv_dataset", "sglp",
    "soft_threshold", "support_sets", "truncate_to_budget",
    "truncated_l1_counts", "write_score_table",
]
