"""Non-smooth penalties and constraints, with subgradient selections.

Every penalty exposes value(x); the convex ones also expose subgradient(x)
and carry is_convex = True so sampling-based subgradient checks know they
apply.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector


def magnitude_order(x):
    """1-based ranks of |x| in ascending order, ties broken by coordinate index.

    order[j] == 1 means x_j has the smallest magnitude.
    """
    x = as_vector(x)
    idx = np.argsort(np.abs(x), kind="stable")
    order = np.empty(x.shape[0], dtype=np.int64)
    order[idx] = np.arange(1, x.shape[0] + 1)
    return order


@dataclass(frozen=True)
class L1Penalty:
    lam: float
    is_convex = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")

    def value(self, x):
        return self.lam * float(np.sum(np.abs(as_vector(x))))

    def subgradient(self, x):
        return self.lam * np.sign(as_vector(x))


@dataclass(frozen=True)
class OscarPenalty:
    """lambda1 * ||x||_1 + lambda2 * sum_{i<j} max(|x_i|, |x_j|).

    Evaluated through the equivalent sorted form: the coordinate with the
    k-th smallest magnitude carries weight lambda1 + lambda2*(k-1).
    """

    lambda1: float
    lambda2: float
    is_convex = True

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("penalty weights must be non-negative")

    def coordinate_weights(self, x):
        return self.lambda1 + self.lambda2 * (magnitude_order(x) - 1)

    def value(self, x):
        x = as_vector(x)
        return float(self.coordinate_weights(x) @ np.abs(x))

    def subgradient(self, x):
        x = as_vector(x)
        return self.coordinate_weights(x) * np.sign(x)


@dataclass(frozen=True, eq=False)
class TraceLassoPenalty:
    """lam * nuclear norm of design @ Diag(x); adapts between lasso and ridge
    shrinkage depending on how correlated the design columns are."""

    lam: float
    design: np.ndarray
    is_convex = True
    rank_rtol = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "design", as_matrix(self.design, "design"))
        if self.lam < 0:
            raise ValueError("lam must be non-negative")

    def _check_dim(self, x):
        if x.shape[0] != self.design.shape[1]:
            raise ValueError(
                f"x has length {x.shape[0]}, design has {self.design.shape[1]} columns"
            )

    def value(self, x):
        x = as_vector(x)
        self._check_dim(x)
        s = np.linalg.svd(self.design * x, compute_uv=False)
        return self.lam * float(np.sum(s))

    def subgradient(self, x):
        """lam * diag(design^T U V^T) from the thin SVD of design @ Diag(x),
        keeping only directions with singular value above rank_rtol * s_max."""
        x = as_vector(x)
        self._check_dim(x)
        u, s, vt = np.linalg.svd(self.design * x, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return np.zeros_like(x)
        keep = s > self.rank_rtol * s[0]
        uv = u[:, keep] @ vt[keep]
        return self.lam * np.einsum("ij,ij->j", self.design, uv)


@dataclass(frozen=True)
class RankConstraint:
    """Indicator of {X : rank(X) <= r}, evaluated with a singular-value cutoff."""

    r: int
    is_convex = False
    tol = 1e-8

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("rank bound must be a positive integer")

    def feasible(self, x, tol=None):
        x = as_matrix(x)
        if self.r >= min(x.shape):
            return True
        s = np.linalg.svd(x, compute_uv=False)
        cutoff = (self.tol if tol is None else tol) * max(s[0], 1.0)
        return bool(s[self.r] <= cutoff)

    def value(self, x):
        return 0.0 if self.feasible(x) else np.inf


def epsilon_subgradient_witness(penalty, x, d, eps, n_samples=1000, seed=0):
    """Search for a point violating h(y) >= h(x) + <d, y-x> - eps.

    Gaussian candidates are drawn around x at several radii. Returns a
    violating y if one is found, else None (evidence, not proof, of
    membership in the eps-subdifferential). Only valid for convex penalties.
    """
    if not getattr(penalty, "is_convex", False):
        raise TypeError(f"{type(penalty).__name__} is not convex; check unsupported")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x = as_vector(x)
    d = as_vector(d)
    if x.shape != d.shape:
        raise ValueError("x and d must have equal length")
    hx = penalty.value(x)
    rng = np.random.default_rng(seed)
    radii = (0.1, 1.0, 10.0)
    per_radius = max(n_samples // len(radii), 1)
    scale = 1.0 + float(np.linalg.norm(x))
    for radius in radii:
        for _ in range(per_radius):
            y = x + radius * scale * rng.standard_normal(x.shape[0])
            if penalty.value(y) < hx + d @ (y - x) - eps - 1e-12:
                return y
    return None
