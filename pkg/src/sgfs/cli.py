"""Command-line front end: projection, solving, benchmarking and the
synthetic-experiment harness with machine-readable reports."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .baselines import StopRule, admm_project, dykstra_project
from .data import (ProjBenchSpec, SyntheticSpec, gen_projection_instance,
                   gen_synthetic_dataset, load_csv_dataset)
from .evaluation import (CvPlan, compute_metrics, cross_validate,
                         write_score_table)
from .model import (GroupPartition, SolverConfig, SparsityBudget,
                    TruncationParam, group_norm, objective)
from .projection import sglp
from .solvers import agm_solve, dc_solve

SEED_ENV = "SGFS_SEED"


def _default_seed():
    return int(os.environ.get(SEED_ENV, "0"))


def _log_base(name):
    return {"e": np.e, "10": 10.0, "2": 2.0}[name]


class Report:
    """Per-run rows plus the config echo; printable and JSONL-exportable."""

    def __init__(self, command, args, seed):
        self.command = command
        self.config = {k: v for k, v in vars(args).items()
                       if k not in ("func",)}
        self.seed = seed
        self.rows = []

    def add(self, **row):
        row.setdefault("seed", self.seed)
        self.rows.append(row)

    def print_table(self, out=sys.stdout):
        if not self.rows:
            return
        cols = list(dict.fromkeys(k for r in self.rows for k in r))
        fmt = []
        for c in cols:
            width = max(len(c), *(len(_cell(r.get(c))) for r in self.rows))
            fmt.append((c, width))
        print("  ".join(c.ljust(w) for c, w in fmt), file=out)
        for r in self.rows:
            print("  ".join(_cell(r.get(c)).ljust(w) for c, w in fmt),
                  file=out)

    def write_jsonl(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            header = {"command": self.command, "config": self.config,
                      "seed": self.seed, "version": __version__}
            fh.write(json.dumps({"meta": header}, default=str) + "\n")
            for r in self.rows:
                fh.write(json.dumps(r, default=_jsonable) + "\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return str(v)


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _load_vector(path):
    return np.loadtxt(path, delimiter=",", dtype=float, ndmin=1)


def _run_projection(method, v, s1, s2, partition, cfg, target=None):
    t0 = time.perf_counter()
    if method == "sglp":
        out = sglp(v, s1, s2, partition, cfg)
        x, converged, iters = out.x, True, out.iterations
    else:
        project = admm_project if method == "admm" else dykstra_project
        stop = StopRule(target_objective=target)
        x, state = project(v, s1, s2, partition, stop=stop)
        converged, iters = state.converged, state.t
    elapsed = time.perf_counter() - t0
    d = x - v
    return x, 0.5 * float(d @ d), elapsed, converged, iters


def cmd_project(args):
    cfg = SolverConfig()
    if args.input:
        v = _load_vector(args.input)
        if args.groups:
            partition = GroupPartition.from_labels(
                np.loadtxt(args.groups, dtype=int, ndmin=1))
        else:
            partition = GroupPartition.contiguous(v.size, args.n_groups)
        s1, s2 = args.s1, args.s2
        if s1 is None or s2 is None:
            raise SystemExit("--s1 and --s2 are required with --input")
    else:
        spec = ProjBenchSpec(p=args.p, seed=args.seed,
                             log_base=_log_base(args.log_base))
        v, budget, partition = gen_projection_instance(spec)
        s1 = args.s1 if args.s1 is not None else budget.s1
        s2 = args.s2 if args.s2 is not None else budget.s2
    report = Report("project", args, args.seed)
    target = None
    if args.method in ("admm", "dykstra"):
        target = 0.5 * float(((sglp(v, s1, s2, partition, cfg).x - v) ** 2).sum())
    x, obj, elapsed, converged, iters = _run_projection(
        args.method, v, s1, s2, partition, cfg, target)
    report.add(method=args.method, p=v.size, s1=s1, s2=s2, objective=obj,
               l1_norm=float(np.abs(x).sum()), group_norm=group_norm(x, partition),
               time_seconds=elapsed, iterations=iters, converged=converged)
    if args.out:
        np.savetxt(args.out, x, fmt="%.17g")
    _finish(report, args)
    return 0 if converged else 1


def cmd_bench_proj(args):
    cfg = SolverConfig()
    report = Report("bench-proj", args, args.seed)
    failed = 0
    for p in args.p_list:
        times = {"sglp": [], "admm": [], "dykstra": []}
        dists = {"admm": [], "dykstra": []}
        # warm-up replication, discarded (first-call overhead)
        spec = ProjBenchSpec(p=p, seed=args.seed,
                             log_base=_log_base(args.log_base))
        v, budget, partition = gen_projection_instance(spec)
        sglp(v, budget.s1, budget.s2, partition, cfg)
        for rep in range(args.reps):
            spec = ProjBenchSpec(p=p, seed=args.seed + rep,
                                 log_base=_log_base(args.log_base))
            v, budget, partition = gen_projection_instance(spec)
            x_ref, f_star, t_ref, _, _ = _run_projection(
                "sglp", v, budget.s1, budget.s2, partition, cfg)
            times["sglp"].append(t_ref)
            for method in args.baselines:
                x, f, t, conv, _ = _run_projection(
                    method, v, budget.s1, budget.s2, partition, cfg,
                    target=f_star)
                times[method].append(t)
                dists[method].append(float(np.linalg.norm(x - x_ref)))
                if not conv:
                    failed += 1
        for method in ["sglp"] + list(args.baselines):
            ts = np.asarray(times[method])
            report.add(method=method, p=p, time_seconds=float(ts.mean()),
                       time_sd=float(ts.std()),
                       distance_to_reference=(None if method == "sglp" else
                                              float(np.mean(dists[method]))),
                       reps=args.reps)
    _finish(report, args)
    return 0 if failed == 0 else 1


def _ls_norms(inst):
    coef, _, _, _ = np.linalg.lstsq(inst.A, inst.y, rcond=None)
    return float(np.abs(coef).sum()), group_norm(coef, inst.partition)


def cmd_bench_synth(args):
    cfg = SolverConfig(agm_rel_tol=args.agm_rel_tol)
    tau = TruncationParam(args.tau)
    report = Report("bench-synth", args, args.seed)
    per_method = {"dc": [], "constrained_sgl": []}
    failures = 0
    for rep in range(args.reps):
        try:
            dataset = gen_synthetic_dataset(SyntheticSpec(seed=args.seed + rep))
            dc_plan = CvPlan(s2_grid=args.dc_s2_grid, s1_grid=args.dc_s1_grid,
                             folds=args.folds, s1_relative=True)
            best, _ = cross_validate(dataset, dc_plan, "dc", tau, cfg)
            x_dc, _ = dc_solve(dataset.train, best, tau, cfg)
            per_method["dc"].append(compute_metrics(x_dc, dataset, tau))

            l1_ls, lg_ls = _ls_norms(dataset.train)
            sgl_plan = CvPlan(s2_grid=[f * lg_ls for f in args.sgl_grid],
                              s1_grid=[f * l1_ls for f in args.sgl_grid],
                              folds=args.folds)
            best, _ = cross_validate(dataset, sgl_plan, "constrained_sgl",
                                     tau, cfg)
            x_sgl, _ = agm_solve(dataset.train, best, cfg=cfg)
            per_method["constrained_sgl"].append(
                compute_metrics(x_sgl, dataset, tau))
        except Exception as exc:  # pragma: no cover - kept out of the means
            failures += 1
            print(f"replication {rep} failed: {exc}", file=sys.stderr)
    for method, metrics in per_method.items():
        if not metrics:
            continue
        report.add(method=method,
                   esti=float(np.mean([m.estimation_error for m in metrics])),
                   pred=float(np.mean([m.prediction_error for m in metrics])),
                   prec=float(np.mean([m.group_precision for m in metrics])),
                   rec=float(np.mean([m.group_recall for m in metrics])),
                   reps=len(metrics), failed=failures)
    _finish(report, args)
    return 0 if failures == 0 else 1


def cmd_solve(args):
    cfg = SolverConfig()
    tau = TruncationParam(args.tau)
    inst = load_csv_dataset(args.matrix, args.response, args.groups,
                            header=args.header)
    report = Report("solve", args, args.seed)
    part = inst.partition
    if args.cv:
        from .data import Dataset
        dataset = Dataset(train=inst, test=inst, truth=None)
        if args.method == "dc":
            plan = CvPlan(s2_grid=args.cv_s2_grid, s1_grid=args.cv_s1_grid,
                          folds=args.folds, s1_relative=True)
        else:
            plan = CvPlan(s2_grid=args.cv_s2_grid, s1_grid=args.cv_s1_grid,
                          folds=args.folds)
        method = "dc" if args.method == "dc" else "constrained_sgl"
        budget, table = cross_validate(dataset, plan, method, tau, cfg)
        if args.cv_table:
            write_score_table(table, args.cv_table)
    elif args.method == "dc":
        budget = SparsityBudget(int(args.s1), int(args.s2), kind="count")
    else:
        budget = SparsityBudget(float(args.s1), float(args.s2), kind="radius")

    t0 = time.perf_counter()
    if args.method == "dc":
        x, trace = dc_solve(inst, budget, tau, cfg)
        converged = trace.converged
        trail = trace.objectives
    else:
        x, state = agm_solve(inst, budget, cfg=cfg)
        converged = state.converged
        trail = [objective(inst, x)]
    elapsed = time.perf_counter() - t0
    n_feat = int(np.sum(np.abs(x) > tau.tau))
    n_grp = int(np.sum(part.group_norms(x) > tau.tau))
    report.add(method=args.method, p=inst.p, s1=budget.s1, s2=budget.s2,
               objective=objective(inst, x), n_features=n_feat,
               n_groups=n_grp, time_seconds=elapsed, converged=converged,
               objective_trace=[round(f, 10) for f in trail])
    if args.out:
        np.savetxt(args.out, x, fmt="%.17g")
    _finish(report, args)
    return 0 if converged else 1


def _finish(report, args):
    report.print_table()
    if args.report:
        report.write_jsonl(args.report)


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=_default_seed(),
                    help=f"RNG seed (default ${SEED_ENV} or 0)")
    sp.add_argument("--report", help="write machine-readable JSONL here")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sgfs",
        description="Sparse group feature selection toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a vector onto the two balls")
    p.add_argument("--method", choices=["sglp", "admm", "dykstra"],
                   default="sglp")
    p.add_argument("--input", help="CSV vector to project")
    p.add_argument("--groups", help="per-feature group-id file")
    p.add_argument("--n-groups", type=int, default=10,
                   help="contiguous group count when no group file is given")
    p.add_argument("--p", type=int, default=100,
                   help="generated instance size when no --input")
    p.add_argument("--s1", type=float)
    p.add_argument("--s2", type=float)
    p.add_argument("--log-base", choices=["e", "10", "2"], default="e")
    p.add_argument("--out", help="write the solution vector here")
    _add_common(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bench-proj", help="projection timing benchmark")
    p.add_argument("--p-list", type=lambda s: [int(t) for t in s.split(",")],
                   default=[100, 1000, 10000])
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--baselines", type=lambda s: s.split(","),
                   default=["admm", "dykstra"])
    p.add_argument("--log-base", choices=["e", "10", "2"], default="e")
    _add_common(p)
    p.set_defaults(func=cmd_bench_proj)

    p = sub.add_parser("bench-synth", help="synthetic selection benchmark")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--folds", default="loo",
                   type=lambda s: s if s == "loo" else int(s))
    p.add_argument("--dc-s2-grid", type=lambda s: [int(t) for t in s.split(",")],
                   default=[2, 4, 6, 8])
    p.add_argument("--dc-s1-grid", type=lambda s: [int(t) for t in s.split(",")],
                   default=[2, 4, 6, 8], help="multipliers of s2")
    p.add_argument("--sgl-grid", type=lambda s: [float(t) for t in s.split(",")],
                   default=[0.2, 0.4, 0.6, 0.8],
                   help="radius fractions of the least-squares norms")
    p.add_argument("--agm-rel-tol", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=cmd_bench_synth)

    p = sub.add_parser("solve", help="fit a CSV dataset")
    p.add_argument("--matrix", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--groups", required=True)
    p.add_argument("--header", action="store_true",
                   help="matrix CSV has a header row")
    p.add_argument("--method", choices=["dc", "sgl"], default="dc")
    p.add_argument("--s1", type=float)
    p.add_argument("--s2", type=float)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--cv", action="store_true")
    p.add_argument("--folds", default=5,
                   type=lambda s: s if s == "loo" else int(s))
    p.add_argument("--cv-s2-grid", type=lambda s: [float(t) for t in s.split(",")],
                   default=[2, 4, 6, 8])
    p.add_argument("--cv-s1-grid", type=lambda s: [float(t) for t in s.split(",")],
                   default=[2, 4, 6, 8])
    p.add_argument("--cv-table", help="write the CV score table CSV here")
    p.add_argument("--out", help="write the solution vector here")
    _add_common(p)
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command != "solve" or not args.cv:
        if args.command == "solve" and (args.s1 is None or args.s2 is None):
            raise SystemExit("--s1/--s2 required unless --cv is given")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
