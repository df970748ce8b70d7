"""Matrix factorization primitives used throughout the library."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SvdResult",
    "svd",
    "spectral_norm",
    "nuclear_norm",
    "top_singular_pair",
    "project_spectral_ball",
]


@dataclass(frozen=True)
class SvdResult:
    """Reduced SVD A = U diag(s) V' with orthonormal columns in U, V."""

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def _check_finite(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def svd(A: np.ndarray) -> SvdResult:
    """Reduced SVD with nonincreasing singular values."""
    A = _check_finite(A)
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    return SvdResult(s, u, vt.T)


def spectral_norm(A: np.ndarray) -> float:
    """Largest singular value."""
    A = _check_finite(A)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def nuclear_norm(A: np.ndarray) -> float:
    """Sum of singular values."""
    A = _check_finite(A)
    return float(np.linalg.svd(A, compute_uv=False).sum())


def top_singular_pair(A: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """(sigma_1, u, v) with u'Av = sigma_1."""
    res = svd(A)
    return float(res.singular_values[0]), res.left_vectors[:, 0], res.right_vectors[:, 0]


def project_spectral_ball(A: np.ndarray) -> np.ndarray:
    """Frobenius projection onto {B : ||B||_sigma <= 1}: clip singular values at 1."""
    A = _check_finite(A)
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] <= 1.0:
        return A
    return (u * np.minimum(s, 1.0)) @ vt
