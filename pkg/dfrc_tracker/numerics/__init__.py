"""Small dense matrix helpers and the real-augmentation bridge."""

from dfrc_tracker.numerics.matrix import (
    DEFAULT_COND_CAP,
    hermitian,
    invert,
    is_symmetric,
    mat_mul,
    min_eigenvalue_ok,
    real_augment_vec,
    real_deaugment_vec,
    symmetrize,
)

__all__ = [
    "DEFAULT_COND_CAP",
    "hermitian",
    "invert",
    "is_symmetric",
    "mat_mul",
    "min_eigenvalue_ok",
    "real_augment_vec",
    "real_deaugment_vec",
    "symmetrize",
]
