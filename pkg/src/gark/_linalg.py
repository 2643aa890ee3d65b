"""Dense linear algebra helpers with explicit singularity reporting."""

from __future__ import annotations

import numpy as np
import scipy.linalg


class SingularMatrixError(ValueError):
    """A dense solve hit a pivot below the singularity threshold."""


#: Relative pivot threshold: a factorization counts as singular when some
#: U-pivot magnitude drops below PIVOT_RTOL * max|A|.
PIVOT_RTOL = 1e-13


def lu_factor_checked(a: np.ndarray, label: str = "matrix"):
    """LU-factorize with partial pivoting, rejecting (near-)singular input."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{label} must be square, got shape {a.shape}")
    scale = np.abs(a).max() if a.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError(f"{label} is identically zero")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    if np.abs(np.diag(lu)).min() < PIVOT_RTOL * scale:
        raise SingularMatrixError(f"{label} is singular to working precision")
    return lu, piv


def solve_checked(a: np.ndarray, b: np.ndarray, label: str = "matrix") -> np.ndarray:
    """Solve a @ x = b by checked LU with partial pivoting."""
    lu_piv = lu_factor_checked(a, label)
    return scipy.linalg.lu_solve(lu_piv, b, check_finite=False)


def min_symmetric_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(m).min())


def is_psd(m: np.ndarray, tol: float) -> bool:
    """Entry point for all PSD tests: min eigenvalue above -tol*(1+||m||_inf)."""
    scale = 1.0 + float(np.abs(m).max()) if m.size else 1.0
    return min_symmetric_eigenvalue(m) >= -tol * scale
