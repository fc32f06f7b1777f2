"""
Dense matrix helpers used by the tracker.

All functions take and return numpy arrays and never mutate their inputs.
Shapes are checked explicitly so that a mismatch fails with a message naming
both operands instead of silently broadcasting.
"""

import numpy as np
from scipy import linalg

from dfrc_tracker.errors import DimensionError, SingularMatrixError

DEFAULT_COND_CAP = 1e12


def _as_matrix(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim == 1:
        return a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionError(f"Expected a vector or matrix, got shape {a.shape}")
    return a


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Matrix product with an explicit inner-dimension check.

    Vectors are treated as column matrices. No conjugation is applied;
    use `hermitian` for that.

    Raises:
        DimensionError: If the inner dimensions differ.
    """
    a_m = _as_matrix(a)
    b_m = _as_matrix(b)
    if a_m.shape[1] != b_m.shape[0]:
        raise DimensionError(
            f"Cannot multiply {a_m.shape[0]}x{a_m.shape[1]} by {b_m.shape[0]}x{b_m.shape[1]}"
        )
    return a_m @ b_m


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return _as_matrix(a).conj().T


def invert(a: np.ndarray, cond_cap: float = DEFAULT_COND_CAP) -> np.ndarray:
    """
    Invert a square matrix through a pivoted LU factorization.

    The 1-norm condition number ||A||_1 * ||A^-1||_1 is computed from the
    factorization and compared against `cond_cap`.

    Args:
        a: Square matrix.
        cond_cap: Largest acceptable condition number.

    Returns:
        The inverse of `a`.

    Raises:
        DimensionError: If `a` is not square.
        SingularMatrixError: If `a` is singular or its condition exceeds the cap.
    """
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"Cannot invert non-square {a.shape[0]}x{a.shape[1]} matrix")
    if not np.all(np.isfinite(a)):
        raise SingularMatrixError(float("inf"), cond_cap)

    try:
        lu_piv = linalg.lu_factor(a, check_finite=False)
    except (linalg.LinAlgError, ValueError):
        raise SingularMatrixError(float("inf"), cond_cap)
    if np.any(np.diag(lu_piv[0]) == 0):
        raise SingularMatrixError(float("inf"), cond_cap)

    identity = np.eye(a.shape[0], dtype=a.dtype)
    inverse = linalg.lu_solve(lu_piv, identity, check_finite=False)

    condition = float(np.linalg.norm(a, 1) * np.linalg.norm(inverse, 1))
    if not np.isfinite(condition) or condition > cond_cap:
        raise SingularMatrixError(condition, cond_cap)
    return inverse


def real_augment_vec(z: np.ndarray) -> np.ndarray:
    """
    Interleave real and imaginary parts: [Re z1, Im z1, Re z2, Im z2, ...].

    This is the single real layout used by the tracker and the harness.
    """
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def real_deaugment_vec(x: np.ndarray) -> np.ndarray:
    """Inverse of `real_augment_vec`."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size % 2:
        raise DimensionError(f"Augmented vector must have even length, got {x.size}")
    return x[0::2] + 1j * x[1::2]


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + A^T) / 2."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"Cannot symmetrize non-square {a.shape[0]}x{a.shape[1]} matrix")
    return 0.5 * (a + a.T)


def is_symmetric(a: np.ndarray, rtol: float = 1e-12) -> bool:
    """Check max|A - A^T| <= rtol * max|A|."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    scale = np.max(np.abs(a)) if a.size else 0.0
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= rtol * scale)


def min_eigenvalue_ok(m: np.ndarray, rtol: float = 1e-9) -> bool:
    """Eigenvalue floor check for an MSE matrix: lambda_min >= -rtol * trace(M)."""
    m = symmetrize(m)
    floor = -rtol * abs(float(np.trace(m)))
    return bool(np.linalg.eigvalsh(m).min() >= floor)
