"""Proximal gradient solvers with inexact inner solves.

Six solver kinds share two engines: pg/ipg run the basic prox-gradient loop,
apg/aipg and nmapg/nmaipg run the accelerated loop with a monitor step. The
exact kinds are the inexact code paths with an exact prox and eps_k = 0; they
are not separate implementations.

The accelerated loop keeps two sequences: the extrapolated candidate z (built
from the momentum point y) and the monitor v (a plain prox-gradient step from
the current x). Accepting whichever has the smaller objective is what makes
acceleration safe on non-convex problems. The non-monotone variant first
tries to accept z outright whenever it improves on f(x_k) by at least
(delta/2) * ||z - y||^2, skipping the monitor prox entirely on such steps.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .penalties import L1Penalty, OscarPenalty, RankConstraint, TraceLassoPenalty
from .prox import (
    ProxResult,
    prox_l1,
    prox_oscar_exact,
    prox_oscar_inexact,
    prox_rank,
    prox_tracelasso_inexact,
)

SOLVER_KINDS = ("pg", "apg", "nmapg", "ipg", "aipg", "nmaipg")
EXACT_KINDS = ("pg", "apg", "nmapg")
EARLY_STOP_STREAK = 5


class SolverAbort(RuntimeError):
    """Raised when a run hits a non-finite objective; carries the partial trace."""

    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = list(records) if records else []


@dataclass(frozen=True)
class ErrorSchedule:
    """Per-iteration inexactness targets eps_k.

    constant: eps_k = c (c = 0 requests exact proximal steps)
    polynomial: eps_k = c / k**p
    adaptive: eps_k = max(alpha * prev_step_sq, floor), where prev_step_sq is
        the squared monitor displacement of the previous iteration
    """

    kind: str
    c: float = 0.0
    p: float = 0.0
    alpha: float = 0.0
    floor: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("constant", "polynomial", "adaptive"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.c < 0 or self.floor < 0:
            raise ValueError("schedule constants must be non-negative")
        if self.kind == "polynomial" and self.p < 0:
            raise ValueError("polynomial exponent must be non-negative")
        if self.kind == "adaptive":
            if self.alpha < 0:
                raise ValueError("adaptive schedule needs alpha >= 0")
            if self.floor <= 0:
                raise ValueError("adaptive schedule needs a positive floor")

    @classmethod
    def constant(cls, c):
        return cls("constant", c=c)

    @classmethod
    def polynomial(cls, c, p):
        return cls("polynomial", c=c, p=p)

    @classmethod
    def adaptive(cls, alpha, floor=1e-12):
        return cls("adaptive", alpha=alpha, floor=floor)


def schedule_eps(schedule, k, prev_step_sq=0.0):
    if k < 1:
        raise ValueError("iteration index starts at 1")
    if schedule.kind == "constant":
        return schedule.c
    if schedule.kind == "polynomial":
        return schedule.c / float(k) ** schedule.p
    return max(schedule.alpha * prev_step_sq, schedule.floor)


def momentum_next(t):
    """t_{k+1} = (sqrt(4 t_k^2 + 1) + 1) / 2; satisfies t'^2 - t' = t^2."""
    if t < 0:
        raise ValueError("momentum parameter must be non-negative")
    return 0.5 * (math.sqrt(4.0 * t * t + 1.0) + 1.0)


def extrapolate(x_cur, x_prev, z_cur, t_prev, t_cur):
    """Momentum point y_k combining the candidate and accepted sequences."""
    return (
        x_cur
        + (t_prev / t_cur) * (z_cur - x_cur)
        + ((t_prev - 1.0) / t_cur) * (x_cur - x_prev)
    )


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int
    solver_kind: str
    gamma: float | None = None  # None picks 0.9 / L at run start
    delta: float = 0.6
    error_schedule: ErrorSchedule = field(default_factory=lambda: ErrorSchedule.polynomial(1e-2, 2.0))
    seed: int = 0
    objective_tolerance: float | None = None  # early stopping, off by default
    inner_max_iters: int = 2000
    rank_mode: str = "power"  # SVD mode for rank prox under inexact kinds
    rank_power_iters: int = 100

    def __post_init__(self):
        if self.solver_kind not in SOLVER_KINDS:
            raise ValueError(f"unknown solver kind {self.solver_kind!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.rank_mode not in ("exact", "power"):
            raise ValueError("rank_mode must be 'exact' or 'power'")


@dataclass
class IterationRecord:
    k: int
    objective: float
    step_norm_sq: float
    eps_k: float
    certified_eps: float
    inner_iters: int
    branch: str
    wall_seconds: float
    inner_converged: bool = True
    monitor_objective: float | None = None
    monitor_step_sq: float | None = None
    monitor_eps: float | None = None
    monitor_inner_iters: int = 0
    z_objective: float | None = None
    z_step_sq: float | None = None


@dataclass
class IterationTrace:
    solver_kind: str
    gamma: float
    seed: int
    records: list
    final_point: np.ndarray
    iterates: list | None = None

    def objectives(self):
        return np.array([r.objective for r in self.records])

    def displacements(self):
        return np.array([r.step_norm_sq for r in self.records[1:]])

    def key(self):
        """Everything that must be reproducible; wall time is excluded."""
        return tuple(
            (r.k, r.objective, r.step_norm_sq, r.eps_k, r.certified_eps, r.inner_iters, r.branch)
            for r in self.records
        )


class _WarmStart:
    """Previous prox output plus a step-schedule clock, one per prox site."""

    def __init__(self):
        self.point = None
        self.clock = 0

    def start_from(self, anchor):
        if self.point is not None and self.point.shape == anchor.shape:
            return self.point
        return None

    def update(self, result):
        self.point = result.point
        self.clock += result.inner_iters


def _make_prox(penalty, use_exact, config):
    """Bind a penalty to a callable (anchor, gamma, eps_k, warm) -> ProxResult."""

    if isinstance(penalty, (L1Penalty, OscarPenalty)):
        if isinstance(penalty, L1Penalty):
            l1, l2 = penalty.lam, 0.0
        else:
            l1, l2 = penalty.lambda1, penalty.lambda2

        def exact_call(anchor, gamma):
            if l2 == 0.0:
                return prox_l1(anchor, gamma * l1)
            return prox_oscar_exact(anchor, gamma, l1, l2)

        def call(anchor, gamma, eps_k, warm):
            if use_exact or eps_k == 0.0 or (l1 == 0.0 and l2 == 0.0):
                return ProxResult(exact_call(anchor, gamma), 0.0, 0, [], True)
            res = prox_oscar_inexact(
                anchor, gamma, l1, l2, eps_target=eps_k,
                max_inner=config.inner_max_iters, x0=warm.start_from(anchor),
            )
            warm.update(res)
            return res

        return call

    if isinstance(penalty, TraceLassoPenalty):
        if use_exact:
            raise ValueError("trace-lasso penalty has no exact prox; use an inexact solver kind")

        def call(anchor, gamma, eps_k, warm):
            res = prox_tracelasso_inexact(
                anchor, gamma, penalty, inner_budget=config.inner_max_iters,
                eps_target=eps_k, x0=warm.start_from(anchor), step_offset=warm.clock,
            )
            warm.update(res)
            return res

        return call

    if isinstance(penalty, RankConstraint):
        mode = "exact" if use_exact else config.rank_mode

        def call(anchor, gamma, eps_k, warm):
            return prox_rank(
                anchor, penalty.r, mode=mode,
                power_iters=config.rank_power_iters, seed=config.seed,
            )

        return call

    raise TypeError(f"no prox rule for {type(penalty).__name__}")


def _sq_norm(a):
    return float(np.sum(a * a))


def _resolve_gamma(loss, config):
    lip = loss.lipschitz()
    if lip is None or not np.isfinite(lip) or lip < 0:
        raise ValueError("objective does not provide a usable Lipschitz bound; refusing to run")
    gamma = config.gamma if config.gamma is not None else (0.9 / lip if lip > 0 else 1.0)
    if lip > 0 and not gamma < 1.0 / lip:
        raise ValueError(f"gamma={gamma} violates gamma < 1/L = {1.0 / lip}")
    return gamma


def _objective(loss, penalty, x):
    value, grad = loss.eval(x)
    return value + penalty.value(x), grad


def _check_finite(fval, k, kind, records=None):
    if not np.isfinite(fval):
        raise SolverAbort(f"{kind} aborted: objective became {fval} at iteration {k}", records)


def run_solver(loss, penalty, x0, config, keep_iterates=False):
    """Run the configured solver and return its IterationTrace."""
    if config.solver_kind in ("pg", "ipg"):
        return _run_basic(loss, penalty, x0, config, keep_iterates)
    return _run_accelerated(loss, penalty, x0, config, keep_iterates)


def run_ipg(loss, penalty, x0, config):
    if config.solver_kind not in ("pg", "ipg"):
        raise ValueError("config.solver_kind must be pg or ipg")
    return _run_basic(loss, penalty, x0, config, False)


def run_aipg(loss, penalty, x0, config, keep_iterates=False):
    if config.solver_kind not in ("apg", "aipg"):
        raise ValueError("config.solver_kind must be apg or aipg")
    return _run_accelerated(loss, penalty, x0, config, keep_iterates)


def run_nmaipg(loss, penalty, x0, config, keep_iterates=False):
    if config.solver_kind not in ("nmapg", "nmaipg"):
        raise ValueError("config.solver_kind must be nmapg or nmaipg")
    return _run_accelerated(loss, penalty, x0, config, keep_iterates)


def run_matrix_solver(loss, constraint, x0, config, keep_iterates=False):
    """Rank-constrained runs; identical engines on matrix iterates."""
    if not isinstance(constraint, RankConstraint):
        raise TypeError("matrix runs expect a RankConstraint")
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 2:
        raise ValueError("matrix solver needs a 2-d starting point")
    return run_solver(loss, constraint, x0, config, keep_iterates)


def _init_state(loss, penalty, x0, config):
    x0 = np.asarray(x0, dtype=np.float64)
    if not np.all(np.isfinite(x0)):
        raise ValueError("starting point contains non-finite entries")
    gamma = _resolve_gamma(loss, config)
    exact = config.solver_kind in EXACT_KINDS
    prox = _make_prox(penalty, exact, config)
    f0, _ = _objective(loss, penalty, x0)
    _check_finite(f0, 0, config.solver_kind)
    return x0.copy(), gamma, exact, prox, f0


def _early_stop(streak, f_new, f_old, tol):
    if tol is None:
        return 0, False
    streak = streak + 1 if abs(f_new - f_old) <= tol else 0
    return streak, streak >= EARLY_STOP_STREAK


def _run_basic(loss, penalty, x0, config, keep_iterates):
    x, gamma, exact, prox, f_cur = _init_state(loss, penalty, x0, config)
    start = time.perf_counter()
    records = [IterationRecord(0, f_cur, 0.0, 0.0, 0.0, 0, "init", 0.0)]
    iterates = [{"x": x.copy()}] if keep_iterates else None
    warm = _WarmStart()
    prev_step_sq = 0.0
    streak = 0
    for k in range(1, config.max_iters + 1):
        eps_k = 0.0 if exact else schedule_eps(config.error_schedule, k, prev_step_sq)
        _, grad = loss.eval(x)
        res = prox(x - gamma * grad, gamma, eps_k, warm)
        x_next = res.point
        f_next, _ = _objective(loss, penalty, x_next)
        _check_finite(f_next, k, config.solver_kind, records)
        step_sq = _sq_norm(x_next - x)
        records.append(
            IterationRecord(
                k, f_next, step_sq, eps_k, res.certified_eps, res.inner_iters,
                "prox", time.perf_counter() - start, res.converged,
                monitor_objective=f_next, monitor_step_sq=step_sq,
                monitor_eps=res.certified_eps, monitor_inner_iters=res.inner_iters,
            )
        )
        if keep_iterates:
            iterates.append({"x": x_next.copy()})
        prev_step_sq = step_sq
        streak, stop = _early_stop(streak, f_next, f_cur, config.objective_tolerance)
        x, f_cur = x_next, f_next
        if stop:
            break
    return IterationTrace(config.solver_kind, gamma, config.seed, records, x, iterates)


def _run_accelerated(loss, penalty, x0, config, keep_iterates):
    x_cur, gamma, exact, prox, f_cur = _init_state(loss, penalty, x0, config)
    nonmonotone = config.solver_kind in ("nmapg", "nmaipg")
    x_prev = x_cur.copy()
    z_cur = x_cur.copy()
    t_prev, t_cur = 0.0, 1.0
    start = time.perf_counter()
    records = [IterationRecord(0, f_cur, 0.0, 0.0, 0.0, 0, "init", 0.0)]
    iterates = [{"x": x_cur.copy()}] if keep_iterates else None
    warm_z, warm_v = _WarmStart(), _WarmStart()
    prev_monitor_sq = 0.0
    streak = 0
    for k in range(1, config.max_iters + 1):
        eps_k = 0.0 if exact else schedule_eps(config.error_schedule, k, prev_monitor_sq)
        y = extrapolate(x_cur, x_prev, z_cur, t_prev, t_cur)
        _, grad_y = loss.eval(y)
        res_z = prox(y - gamma * grad_y, gamma, eps_k, warm_z)
        z_next = res_z.point
        f_z, _ = _objective(loss, penalty, z_next)
        _check_finite(f_z, k, config.solver_kind, records)
        z_step_sq = _sq_norm(z_next - y)

        res_v = None
        f_v = None
        v_step_sq = None
        if nonmonotone and f_z <= f_cur - 0.5 * config.delta * z_step_sq:
            x_next, f_next, branch = z_next, f_z, "shortcut"
            accepted_eps = res_z.certified_eps
        else:
            _, grad_x = loss.eval(x_cur)
            res_v = prox(x_cur - gamma * grad_x, gamma, eps_k, warm_v)
            v_next = res_v.point
            f_v, _ = _objective(loss, penalty, v_next)
            _check_finite(f_v, k, config.solver_kind, records)
            v_step_sq = _sq_norm(v_next - x_cur)
            if f_z <= f_v:
                x_next, f_next, branch = z_next, f_z, "z-accepted"
                accepted_eps = res_z.certified_eps
            else:
                x_next, f_next, branch = v_next, f_v, "v-accepted"
                accepted_eps = res_v.certified_eps

        t_next = momentum_next(t_cur)
        step_sq = _sq_norm(x_next - x_cur)
        records.append(
            IterationRecord(
                k, f_next, step_sq, eps_k, accepted_eps,
                res_z.inner_iters + (res_v.inner_iters if res_v else 0),
                branch, time.perf_counter() - start,
                res_z.converged and (res_v.converged if res_v else True),
                monitor_objective=f_v,
                monitor_step_sq=v_step_sq,
                monitor_eps=res_v.certified_eps if res_v else None,
                monitor_inner_iters=res_v.inner_iters if res_v else 0,
                z_objective=f_z,
                z_step_sq=z_step_sq,
            )
        )
        if keep_iterates:
            iterates.append(
                {
                    "x": x_next.copy(),
                    "y": y.copy(),
                    "z": z_next.copy(),
                    "v": res_v.point.copy() if res_v else None,
                    "f_x_prev": f_cur,
                }
            )
        # adaptive schedules key off the monitor displacement when one exists
        prev_monitor_sq = v_step_sq if v_step_sq is not None else step_sq
        streak, stop = _early_stop(streak, f_next, f_cur, config.objective_tolerance)
        x_prev, x_cur = x_cur, x_next
        z_cur = z_next
        t_prev, t_cur = t_cur, t_next
        f_cur = f_next
        if stop:
            break
    return IterationTrace(config.solver_kind, gamma, config.seed, records, x_cur, iterates)
