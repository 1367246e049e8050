"""Experiment orchestration: build an application instance, run solvers, emit CSV.

Each application names a loss/regularizer pairing over a seeded synthetic
dataset. All solvers in one experiment share the dataset and the zero
starting point, so their k=0 rows agree exactly. Robust applications
standardize targets before fitting, which is what makes the fixed
correntropy bandwidth of 1 meaningful across instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datagen import gen_correlated_design, gen_grouped_regression, gen_signed_lowrank
from .dataio import TraceRow, load_regression_csv, load_sign_triplets, trace_rows, write_trace_csv
from .losses import CorrentropyLoss, MaskedLogisticLoss, SquareLoss
from .penalties import L1Penalty, OscarPenalty, RankConstraint, TraceLassoPenalty
from .solvers import IterationTrace, SolverAbort, run_solver

APPLICATIONS = ("robust_oscar", "link_prediction", "robust_tracelasso", "lasso_baseline")

APP_DEFAULTS = {
    "robust_oscar": {"n": 200, "d": 50, "n_groups": 5, "outlier_frac": 0.1, "noise_sd": 0.05},
    "lasso_baseline": {
        "n": 200, "d": 50, "correlation": 0.0, "sparsity": 8,
        "noise_sd": 0.05, "outlier_frac": 0.0,
    },
    "robust_tracelasso": {
        "n": 150, "d": 30, "correlation": 0.9, "sparsity": 5,
        "noise_sd": 0.05, "outlier_frac": 0.1,
    },
    "link_prediction": {"n_users": 60, "true_rank": 3, "obs_frac": 0.3, "margin": 0.5},
}


@dataclass
class ExperimentSpec:
    application: str
    configs: list
    out_path: str
    seed: int = 0
    data_path: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.application not in APPLICATIONS:
            raise ValueError(f"unknown application {self.application!r}")
        if not self.configs:
            raise ValueError("at least one solver config is required")
        unknown = set(self.params) - set(APP_DEFAULTS[self.application])
        if unknown:
            raise ValueError(f"parameters {sorted(unknown)} not used by {self.application}")


@dataclass
class Problem:
    loss: object
    regularizer: object
    x0: np.ndarray
    x_ref: np.ndarray | None = None  # ground truth on the fitted scale
    extras: dict = field(default_factory=dict)


def _standardized(dataset):
    mean = float(np.mean(dataset.targets))
    sd = float(np.std(dataset.targets))
    if sd == 0.0:
        sd = 1.0
    scaled = type(dataset)(dataset.design, (dataset.targets - mean) / sd)
    return scaled, mean, sd


def build_problem(application, seed=0, params=None, data_path=None):
    """Materialize the dataset and the loss/regularizer pair for one application."""
    if application not in APPLICATIONS:
        raise ValueError(f"unknown application {application!r}")
    p = dict(APP_DEFAULTS[application])
    p.update(params or {})

    if application == "link_prediction":
        if data_path is not None:
            observed = load_sign_triplets(data_path)
            truth = None
            rank = p["true_rank"]
        else:
            observed, truth = gen_signed_lowrank(
                p["n_users"], p["true_rank"], p["obs_frac"], p["margin"], seed,
            )
            rank = p["true_rank"]
        loss = MaskedLogisticLoss(observed)
        x0 = np.zeros((observed.n_users, observed.n_users))
        return Problem(loss, RankConstraint(rank), x0, extras={"truth": truth, "observed": observed})

    if data_path is not None:
        dataset, x_true = load_regression_csv(data_path), None
    elif application == "robust_oscar":
        dataset, x_true = gen_grouped_regression(
            p["n"], p["d"], p["n_groups"], p["outlier_frac"], p["noise_sd"], seed,
        )
    else:
        dataset, x_true = gen_correlated_design(
            p["n"], p["d"], p["correlation"], p["sparsity"],
            p["noise_sd"], p["outlier_frac"], seed,
        )

    n, d = dataset.n_samples, dataset.n_features
    x0 = np.zeros(d)
    if application == "lasso_baseline":
        lam = 0.1 / math.sqrt(n)
        return Problem(SquareLoss(dataset), L1Penalty(lam), x0, x_ref=x_true)

    scaled, _, sd = _standardized(dataset)
    x_ref = None if x_true is None else x_true / sd
    loss = CorrentropyLoss(scaled, sigma=1.0)
    if application == "robust_oscar":
        lam = 0.1 / math.sqrt(n)
        return Problem(loss, OscarPenalty(lam, lam), x0, x_ref=x_ref)
    return Problem(loss, TraceLassoPenalty(0.1, scaled.design), x0, x_ref=x_ref)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    problem: Problem
    traces: list  # (solver_kind, IterationTrace) in spec order, successful runs
    failures: list  # (solver_kind, message)
    csv_path: Path

    @property
    def ok(self):
        return not self.failures


def run_experiment(spec):
    """Run every configured solver on the shared instance and write the trace CSV.

    A solver abort is recorded as a final `failed` row for that solver and
    reported in the result; completed rows are preserved either way.
    """
    problem = build_problem(spec.application, spec.seed, spec.params, spec.data_path)
    run_id = f"{spec.application}-s{spec.seed}"
    rows = []
    traces = []
    failures = []
    for config in spec.configs:
        kind = config.solver_kind
        try:
            trace = run_solver(problem.loss, problem.regularizer, problem.x0, config)
        except SolverAbort as exc:
            failures.append((kind, str(exc)))
            partial = IterationTrace(kind, float("nan"), config.seed, exc.records, problem.x0)
            rows.extend(trace_rows(run_id, kind, partial))
            rows.append(
                TraceRow(run_id, kind, len(exc.records), 0.0, float("nan"), 0.0, 0.0, 0.0, 0, "failed")
            )
            continue
        except (RuntimeError, ValueError, TypeError) as exc:
            failures.append((kind, str(exc)))
            rows.append(
                TraceRow(run_id, kind, 0, 0.0, float("nan"), 0.0, 0.0, 0.0, 0, "failed")
            )
            continue
        traces.append((kind, trace))
        rows.extend(trace_rows(run_id, kind, trace))
    path = write_trace_csv(spec.out_path, rows)
    return ExperimentResult(spec, problem, traces, failures, path)
