"""Shared dense linear algebra helpers: SPD factorization and solves."""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = ["NotPositiveDefiniteError", "cholesky_lower", "solve_lower", "solve_spd", "ensure_symmetric"]


class NotPositiveDefiniteError(ValueError):
    """A matrix required to be symmetric positive definite failed to factorize.

    Recoverable: callers tuning a shrinkage intensity can catch this and move
    to a different grid point.
    """


def ensure_symmetric(a: np.ndarray, name: str, tol: float = 1e-8) -> np.ndarray:
    """Validate symmetry within ``tol`` (relative) and return the symmetrized matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.T).max() > tol * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (a + a.T)


def cholesky_lower(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Lower-triangular Cholesky factor; raises :class:`NotPositiveDefiniteError`."""
    try:
        return scipy.linalg.cholesky(a, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"{name} is not positive definite: {exc}") from None


def solve_lower(l_factor: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``L w = b`` for lower-triangular ``L``."""
    return scipy.linalg.solve_triangular(l_factor, b, lower=True, check_finite=False)


def solve_spd(a: np.ndarray, b: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Solve ``a x = b`` for SPD ``a`` through its Cholesky factorization."""
    l_factor = cholesky_lower(a, name)
    w = solve_lower(l_factor, b)
    return scipy.linalg.solve_triangular(l_factor, w, lower=True, trans="T", check_finite=False)
