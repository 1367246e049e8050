"""Command line front end.

Three subcommands: `bench` runs a named application end to end and writes a
trace CSV, `gen` materializes a synthetic dataset to disk, and `solve` runs
solvers on an already-saved dataset with an explicit loss/regularizer pair.
Exit status is 0 only when every requested solver run completes.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import APP_DEFAULTS, APPLICATIONS, ExperimentSpec, run_experiment
from .datagen import gen_correlated_design, gen_grouped_regression, gen_signed_lowrank
from .dataio import (
    TraceRow,
    load_regression_csv,
    load_sign_triplets,
    trace_rows,
    write_regression_csv,
    write_sign_triplets,
    write_trace_csv,
)
from .losses import CorrentropyLoss, MaskedLogisticLoss, SquareLoss
from .penalties import L1Penalty, OscarPenalty, RankConstraint, TraceLassoPenalty
from .solvers import (
    SOLVER_KINDS,
    ErrorSchedule,
    IterationTrace,
    SolverAbort,
    SolverConfig,
    run_solver,
)


def parse_eps_spec(text):
    """Parse `const:<c>`, `poly:<c>,<p>`, or `adaptive:<alpha>[,<floor>]`."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return ErrorSchedule.constant(float(rest))
        if kind == "poly":
            c, p = (float(v) for v in rest.split(","))
            return ErrorSchedule.polynomial(c, p)
        if kind == "adaptive":
            parts = [float(v) for v in rest.split(",")]
            if len(parts) == 1:
                return ErrorSchedule.adaptive(parts[0])
            if len(parts) == 2:
                return ErrorSchedule.adaptive(parts[0], floor=parts[1])
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cannot parse eps spec {text!r}; "
            "expected const:<c>, poly:<c>,<p>, or adaptive:<alpha>[,<floor>]"
        ) from None
    raise argparse.ArgumentTypeError(f"unknown eps schedule kind {kind!r}")


# (flag, params key, type, help) for the generator size knobs. Every flag is
# accepted syntactically by bench/gen; semantic validation against the chosen
# application happens when the parameter set is merged.
_PARAM_FLAGS = (
    ("--n", "n", int, "sample count"),
    ("--d", "d", int, "feature count"),
    ("--groups", "n_groups", int, "number of contiguous feature groups"),
    ("--outlier-frac", "outlier_frac", float, "fraction of corrupted targets"),
    ("--noise-sd", "noise_sd", float, "additive target noise level"),
    ("--correlation", "correlation", float, "pairwise feature correlation"),
    ("--sparsity", "sparsity", int, "nonzero count in the true coefficients"),
    ("--users", "n_users", int, "user count (square sign matrix side)"),
    ("--rank", "true_rank", int, "ground-truth rank"),
    ("--obs-frac", "obs_frac", float, "fraction of observed sign entries"),
    ("--margin", "margin", float, "minimum magnitude of sampled entries"),
)


def _add_param_flags(parser):
    for flag, dest, typ, help_text in _PARAM_FLAGS:
        parser.add_argument(flag, dest=dest, type=typ, default=None, help=help_text)


def _collect_params(args):
    out = {}
    for _, dest, _, _ in _PARAM_FLAGS:
        value = getattr(args, dest)
        if value is not None:
            out[dest] = value
    return out


def _merged_params(application, args):
    params = _collect_params(args)
    unknown = set(params) - set(APP_DEFAULTS[application])
    if unknown:
        raise ValueError(f"parameters {sorted(unknown)} not used by {application}")
    merged = dict(APP_DEFAULTS[application])
    merged.update(params)
    return merged


def _add_solver_flags(parser):
    parser.add_argument(
        "--solver", action="append", choices=SOLVER_KINDS, default=None,
        help="solver to run; repeat the flag to compare several (default: ipg)",
    )
    parser.add_argument("--gamma", type=float, default=None, help="step size (default 0.9/L)")
    parser.add_argument("--max-iters", type=int, default=500, help="outer iteration budget")
    parser.add_argument(
        "--eps", type=parse_eps_spec, default=ErrorSchedule.polynomial(1e-2, 2.0),
        help="inexactness schedule: const:<c> | poly:<c>,<p> | adaptive:<alpha>[,<floor>]",
    )
    parser.add_argument("--delta", type=float, default=0.6, help="shortcut descent coefficient")
    parser.add_argument("--seed", type=int, default=0, help="dataset and solver seed")
    parser.add_argument("--inner-max-iters", type=int, default=2000, help="inner prox budget")


def _build_configs(args):
    kinds = args.solver or ["ipg"]
    return [
        SolverConfig(
            max_iters=args.max_iters,
            solver_kind=kind,
            gamma=args.gamma,
            delta=args.delta,
            error_schedule=args.eps,
            seed=args.seed,
            inner_max_iters=args.inner_max_iters,
        )
        for kind in kinds
    ]


def _cmd_bench(args):
    spec = ExperimentSpec(
        args.application,
        _build_configs(args),
        args.out,
        seed=args.seed,
        data_path=args.data,
        params=_collect_params(args),
    )
    result = run_experiment(spec)
    for kind, message in result.failures:
        print(f"solver {kind} failed: {message}", file=sys.stderr)
    for kind, trace in result.traces:
        final = trace.records[-1].objective
        print(f"{kind}: iters={trace.records[-1].k} objective={final:.10g}")
    print(f"wrote {result.csv_path}")
    return 0 if result.ok else 1


def _cmd_gen(args):
    params = _merged_params(args.application, args)
    if args.application == "link_prediction":
        observed, _ = gen_signed_lowrank(
            params["n_users"], params["true_rank"], params["obs_frac"],
            params["margin"], args.seed,
        )
        path = write_sign_triplets(args.out, observed)
    elif args.application == "robust_oscar":
        dataset, _ = gen_grouped_regression(
            params["n"], params["d"], params["n_groups"],
            params["outlier_frac"], params["noise_sd"], args.seed,
        )
        path = write_regression_csv(args.out, dataset)
    else:
        dataset, _ = gen_correlated_design(
            params["n"], params["d"], params["correlation"], params["sparsity"],
            params["noise_sd"], params["outlier_frac"], args.seed,
        )
        path = write_regression_csv(args.out, dataset)
    print(f"wrote {path}")
    return 0


def _build_solve_problem(args):
    if args.loss == "logistic":
        if args.reg != "rank":
            raise ValueError("logistic loss works on sign matrices; use --reg rank")
        observed = load_sign_triplets(args.data)
        loss = MaskedLogisticLoss(observed)
        if args.rank_r is None:
            raise ValueError("--reg rank requires --rank-r")
        x0 = np.zeros((observed.n_users, observed.n_users))
        return loss, RankConstraint(args.rank_r), x0
    if args.reg == "rank":
        raise ValueError("--reg rank applies to matrix problems; use --loss logistic")
    dataset = load_regression_csv(args.data)
    if args.loss == "square":
        loss = SquareLoss(dataset)
    else:
        loss = CorrentropyLoss(dataset, sigma=args.sigma)
    if args.reg == "l1":
        penalty = L1Penalty(args.lam)
    elif args.reg == "oscar":
        penalty = OscarPenalty(args.lambda1, args.lambda2)
    else:
        penalty = TraceLassoPenalty(args.lam, dataset.design)
    return loss, penalty, np.zeros(dataset.n_features)


def _cmd_solve(args):
    loss, penalty, x0 = _build_solve_problem(args)
    run_id = f"solve-{args.loss}-{args.reg}-s{args.seed}"
    rows = []
    failed = False
    for config in _build_configs(args):
        kind = config.solver_kind
        try:
            trace = run_solver(loss, penalty, x0, config)
        except SolverAbort as exc:
            failed = True
            print(f"solver {kind} failed: {exc}", file=sys.stderr)
            partial = IterationTrace(kind, float("nan"), config.seed, exc.records, x0)
            rows.extend(trace_rows(run_id, kind, partial))
            rows.append(
                TraceRow(run_id, kind, len(exc.records), 0.0, float("nan"), 0.0, 0.0, 0.0, 0, "failed")
            )
            continue
        except (RuntimeError, ValueError, TypeError) as exc:
            failed = True
            print(f"solver {kind} failed: {exc}", file=sys.stderr)
            rows.append(TraceRow(run_id, kind, 0, 0.0, float("nan"), 0.0, 0.0, 0.0, 0, "failed"))
            continue
        rows.extend(trace_rows(run_id, kind, trace))
        final = trace.records[-1].objective
        print(f"{kind}: iters={trace.records[-1].k} objective={final:.10g}")
    if args.out is not None:
        path = write_trace_csv(args.out, rows)
        print(f"wrote {path}")
    return 1 if failed else 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="iprox",
        description="Inexact proximal gradient benchmarks for composite problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run solvers on a named application")
    bench.add_argument("application", choices=APPLICATIONS)
    bench.add_argument("--out", required=True, help="trace CSV output path")
    bench.add_argument("--data", default=None, help="use a saved dataset instead of generating")
    _add_solver_flags(bench)
    _add_param_flags(bench)
    bench.set_defaults(func=_cmd_bench)

    gen = sub.add_parser("gen", help="materialize a synthetic dataset")
    gen.add_argument("application", choices=APPLICATIONS)
    gen.add_argument("--out", required=True, help="dataset output path")
    gen.add_argument("--seed", type=int, default=0, help="generator seed")
    _add_param_flags(gen)
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="run solvers on a saved dataset")
    solve.add_argument("--data", required=True, help="regression CSV or sign-triplet file")
    solve.add_argument("--loss", required=True, choices=("square", "correntropy", "logistic"))
    solve.add_argument("--reg", required=True, choices=("l1", "oscar", "tracelasso", "rank"))
    solve.add_argument("--lam", type=float, default=0.1, help="weight for l1/tracelasso")
    solve.add_argument("--lambda1", type=float, default=0.1, help="first OSCAR weight")
    solve.add_argument("--lambda2", type=float, default=0.1, help="pairwise OSCAR weight")
    solve.add_argument("--rank-r", type=int, default=None, help="rank bound for --reg rank")
    solve.add_argument("--sigma", type=float, default=1.0, help="correntropy bandwidth")
    solve.add_argument("--out", default=None, help="optional trace CSV output path")
    _add_solver_flags(solve)
    solve.set_defaults(func=_cmd_solve)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
