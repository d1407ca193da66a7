"""Pooled covariance estimation, shrinkage toward a target, and factor handles.

Two scalings of the pooled covariance coexist and are labeled on every
regularized value so they cannot be mixed accidentally:

- ``"within-group"``: group-mean-centered scatter divided by ``n - K``;
  the default estimator blended with a shrinkage target.
- ``"gram-pooled-mean"``: the unnormalized Gram matrix of pooled-mean-
  centered rows; the kernel of the SVD ridge classifier.

The regularized matrix is always carried together with its lower Cholesky
factor, so downstream quadratic forms are triangular solves rather than
inversions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import NotPositiveDefiniteError, cholesky_lower, ensure_symmetric, solve_lower
from .datamodel import GroupedDataset, GroupMeans

__all__ = [
    "NotPositiveDefiniteError",
    "RegularizedCovariance",
    "ShrinkageTarget",
    "lw_lambda",
    "mahalanobis_sq",
    "pooled_covariance",
    "ridge_covariance",
    "shrink_covariance",
]

WITHIN_GROUP = "within-group"
GRAM_POOLED_MEAN = "gram-pooled-mean"


@dataclass(frozen=True)
class ShrinkageTarget:
    """A well-conditioned matrix blended with the empirical covariance.

    Kinds
    -----
    ``"identity"``
        The identity matrix.
    ``"equal-correlation"``
        ``sigma2 * I + theta2 * (11^T - I)``: common variance ``sigma2`` on
        the diagonal, common covariance ``theta2`` off it. When ``sigma2``
        is ``None`` it defaults, at materialization time, to the average
        sample variance of the data being shrunk.
    ``"custom"``
        Any symmetric positive definite matrix.
    """

    kind: str
    sigma2: float | None = None
    theta2: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "equal-correlation", "custom"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "custom":
            if self.matrix is None:
                raise ValueError("custom target needs a matrix")
            mat = ensure_symmetric(self.matrix, "custom target")
            cholesky_lower(mat, "custom target")  # must be PD up front
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)
        elif self.kind == "equal-correlation":
            if self.theta2 is None:
                raise ValueError("equal-correlation target needs theta2")

    @classmethod
    def identity(cls) -> "ShrinkageTarget":
        return cls(kind="identity")

    @classmethod
    def equal_correlation(cls, theta2: float = 0.15, sigma2: float | None = None) -> "ShrinkageTarget":
        return cls(kind="equal-correlation", sigma2=sigma2, theta2=theta2)

    @classmethod
    def custom(cls, matrix) -> "ShrinkageTarget":
        return cls(kind="custom", matrix=matrix)

    def materialize(self, p: int, default_sigma2: float | None = None) -> np.ndarray:
        """Build the p x p target matrix, resolving the default variance scale."""
        if self.kind == "identity":
            return np.eye(p)
        if self.kind == "custom":
            if self.matrix.shape != (p, p):
                raise ValueError(f"custom target is {self.matrix.shape}, expected ({p}, {p})")
            return np.array(self.matrix)
        sigma2 = self.sigma2 if self.sigma2 is not None else default_sigma2
        if sigma2 is None:
            raise ValueError("equal-correlation target needs sigma2 or a data-derived default")
        theta2 = self.theta2
        # PD exactly when both eigenvalues sigma2 - theta2 and sigma2 + (p-1) theta2 are positive.
        if sigma2 - theta2 <= 0 or sigma2 + (p - 1) * theta2 <= 0:
            raise ValueError(
                f"equal-correlation target not positive definite (sigma2={sigma2}, theta2={theta2}, p={p})"
            )
        return sigma2 * np.eye(p) + theta2 * (np.ones((p, p)) - np.eye(p))

    def describe(self) -> dict:
        doc = {"kind": self.kind}
        if self.kind == "equal-correlation":
            doc["sigma2"] = self.sigma2
            doc["theta2"] = self.theta2
        return doc


@dataclass(frozen=True)
class RegularizedCovariance:
    """A positive definite covariance with its lower Cholesky factor.

    ``rule`` records whether target shrinkage ``(1-lam) S + lam T`` or the
    ridge form ``lam S + (1-lam) I`` produced the matrix; ``s_convention``
    records the scaling of the ``S`` that went in.
    """

    matrix: np.ndarray
    lam: float
    factor: np.ndarray
    rule: str
    s_convention: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.rule not in ("target-shrink", "ridge"):
            raise ValueError(f"unknown rule {self.rule!r}")
        matrix = np.asarray(self.matrix, dtype=float)
        factor = np.asarray(self.factor, dtype=float)
        matrix.setflags(write=False)
        factor.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "factor", factor)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]


def pooled_covariance(data: GroupedDataset, means: GroupMeans, convention: str = WITHIN_GROUP) -> np.ndarray:
    """Pooled covariance of a grouped dataset under the named scaling.

    Parameters
    ----------
    data : GroupedDataset
    means : GroupMeans
        Means of ``data`` (pooled and per group).
    convention : str
        ``"within-group"``: sum of outer products of group-mean-centered
        rows divided by ``n - K``. ``"gram-pooled-mean"``: unnormalized
        ``Xc^T Xc`` with rows centered at the pooled mean.

    Raises
    ------
    ValueError
        If the within-group form has fewer than ``K + 1`` observations.
    """
    if convention == WITHIN_GROUP:
        dof = data.n - data.n_groups
        if dof < 1:
            raise ValueError(
                f"within-group pooled covariance needs n >= K + 1 (n={data.n}, K={data.n_groups})"
            )
        resid = data.values - means.per_group[data.labels]
        return resid.T @ resid / dof
    if convention == GRAM_POOLED_MEAN:
        centered = data.values - means.pooled
        return centered.T @ centered
    raise ValueError(f"unknown pooled-covariance convention {convention!r}")


def _factor_with_jitter(matrix: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        return matrix, cholesky_lower(matrix, what)
    except NotPositiveDefiniteError:
        # One retry for float-boundary cases sitting on the PD edge. A matrix
        # that is rank deficient beyond float noise stays an error: the bump
        # must not manufacture positive definiteness out of singularity.
        jitter = 1e-10 * np.trace(matrix) / matrix.shape[0]
        if jitter <= 0 or np.linalg.matrix_rank(matrix) < matrix.shape[0]:
            raise
        bumped = matrix + jitter * np.eye(matrix.shape[0])
        return bumped, cholesky_lower(bumped, what)


def shrink_covariance(
    s: np.ndarray,
    target: ShrinkageTarget,
    lam: float,
    s_convention: str | None = None,
) -> RegularizedCovariance:
    """Blend ``(1 - lam) S + lam T`` and factorize the result.

    ``lam = 0`` returns ``S`` itself and ``lam = 1`` the target. A failed
    factorization (for instance ``lam = 0`` with singular ``S``) raises the
    recoverable :class:`NotPositiveDefiniteError` after a single jittered
    retry.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    s = ensure_symmetric(s, "S")
    p = s.shape[0]
    t = target.materialize(p, default_sigma2=float(np.mean(np.diag(s))) if p else None)
    blended = (1.0 - lam) * s + lam * t
    matrix, factor = _factor_with_jitter(blended, f"shrunk covariance (lam={lam})")
    return RegularizedCovariance(matrix=matrix, lam=lam, factor=factor, rule="target-shrink", s_convention=s_convention)


def ridge_covariance(s: np.ndarray, lam: float, s_convention: str | None = None) -> RegularizedCovariance:
    """The ridge form ``lam S + (1 - lam) I`` (roles of ``lam`` reversed).

    Positive definite for any ``lam < 1``; ``lam = 1`` is accepted exactly
    when ``S`` itself factorizes.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    s = ensure_symmetric(s, "S")
    blended = lam * s + (1.0 - lam) * np.eye(s.shape[0])
    matrix, factor = _factor_with_jitter(blended, f"ridge covariance (lam={lam})")
    return RegularizedCovariance(matrix=matrix, lam=lam, factor=factor, rule="ridge", s_convention=s_convention)


def lw_lambda(data: GroupedDataset, target: ShrinkageTarget) -> float:
    """Analytic shrinkage intensity toward a fixed target, clipped to [0, 1].

    Estimates the intensity that asymptotically minimizes the expected
    squared Frobenius loss of the blend: the summed sampling variance of
    the pooled covariance entries divided by the summed squared distance
    between the empirical matrix and the target,

        lambda = sum_ij Var(s_ij) / sum_ij (s_ij - t_ij)^2 ,

    with the entry variances estimated from the cross products of
    group-centered residuals. The estimate shrinks like 1/n, so it fades
    as evidence accumulates. Only the fixed targets (identity,
    equal-correlation) are supported.
    """
    if target.kind == "custom":
        raise ValueError("lw_lambda supports the identity and equal-correlation targets")
    if data.n < 2:
        raise ValueError("lw_lambda needs at least 2 observations")
    means_per_group = np.empty((data.n_groups, data.p))
    for g in range(data.n_groups):
        means_per_group[g] = data.values[data.labels == g].mean(axis=0)
    resid = data.values - means_per_group[data.labels]
    n = data.n
    dof = n - data.n_groups
    if dof < 1:
        raise ValueError("lw_lambda needs more observations than groups")
    scatter = resid.T @ resid
    s = scatter / dof

    # Entrywise sampling variance of s from the cross-product summands
    # w_kij = r_ki r_kj: sum_k (w_kij - wbar_ij)^2 = (R*R)^T (R*R) - n wbar^2.
    sq = resid * resid
    sum_w_sq = sq.T @ sq
    wbar = scatter / n
    var_s = (n / ((n - 1.0) * dof * dof)) * (sum_w_sq - n * wbar * wbar)

    t = target.materialize(data.p, default_sigma2=float(np.mean(np.diag(s))))
    denom = float(np.sum((s - t) ** 2))
    if denom <= 0.0:
        return 0.0
    return float(np.clip(np.sum(var_s) / denom, 0.0, 1.0))


def mahalanobis_sq(cov: RegularizedCovariance, d) -> float:
    """The quadratic form ``d^T M^-1 d`` via one triangular solve.

    Solving ``L w = d`` against the lower factor gives
    ``||w||^2 = d^T M^-1 d`` without inverting anything.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    w = solve_lower(cov.factor, d)
    return float(w @ w)
