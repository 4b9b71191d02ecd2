"""
Spherical-design residuals through the addition theorem.

For degree n the harmonic moment vector of X has squared norm

    r_n = Z(d, n) / N^2 * sum_{i,j} Pbar_n(<x_i, x_j>),

where Pbar_n is the ultraspherical Jacobi polynomial (alpha = beta = d/2 - 1)
scaled so Pbar_n(1) = 1. X is a t-design exactly when r_1 = ... = r_t = 0.
"""

import math
from typing import Tuple

import numpy as np

from ..core.errors import DomainError, InternalConsistencyError
from ..core.geometry import PointSet
from ..core.jacobi import JacobiParams, jacobi_at_one, jacobi_batch

NEGATIVE_FLOOR = -1e-12
BLOCK_ROWS = 256


def dim_harmonics(d: int, n: int) -> int:
    """Dimension of the degree-n spherical harmonics on S^d."""
    if d < 2 or n < 0:
        raise DomainError(f"need d >= 2 and n >= 0, got d={d}, n={n}")
    return math.comb(n + d, d) - math.comb(n + d - 2, d)


def _zonal_weights(d: int, t: int) -> Tuple[JacobiParams, np.ndarray]:
    """Basis parameters and Z(d, n) / P_n(1) for n = 0..t."""
    params = JacobiParams.symmetric(d / 2 - 1)
    n = np.arange(t + 1)
    Z = np.array([dim_harmonics(d, k) for k in n], dtype=np.float64)
    return params, Z / jacobi_at_one(n, params)


def zonal_moments(points: np.ndarray, d: int, t: int, gradient: bool = False):
    """
    Raw residuals r_1..r_t of an (N, d+1) coordinate array, unclamped, and
    optionally the Euclidean gradient of their sum, (2/N^2) sum_j K'(<x_i, x_j>) x_j
    with K = sum_n Z(d, n) Pbar_n.
    """
    N = points.shape[0]
    params, weights = _zonal_weights(d, t)
    sums = np.zeros(t + 1)
    grad = np.zeros_like(points) if gradient else None

    if gradient and t >= 1:
        n = np.arange(1, t + 1)
        # d/dx P_n^(a,a) = (2a + n + 1)/2 P_{n-1}^(a+1,a+1)
        slope = weights[1:] * (2 * params.alpha + n + 1) / 2
        shifted = params.shifted()

    for lo in range(0, N, BLOCK_ROWS):
        hi = min(lo + BLOCK_ROWS, N)
        G = np.clip(points[lo:hi] @ points.T, -1.0, 1.0)
        table = jacobi_batch(t, params, G)
        sums += table.reshape(t + 1, -1).sum(axis=1)
        if gradient and t >= 1:
            dtable = jacobi_batch(t - 1, shifted, G)
            kernel_slope = np.tensordot(slope, dtable, axes=1)
            grad[lo:hi] = kernel_slope @ points

    residuals = weights[1:] * sums[1:] / N ** 2
    if not gradient:
        return residuals
    return residuals, grad * (2.0 / N ** 2)


def project_tangent(points: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Remove the radial component of vectors[i] at points[i]."""
    return vectors - np.sum(vectors * points, axis=1)[:, None] * points


def design_residual(X: PointSet, t: int) -> np.ndarray:
    """
    Per-degree residuals r_1..r_t, each >= 0.

    Values in [-1e-12, 0) are rounding noise and clamped to 0; anything lower
    raises InternalConsistencyError.
    """
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    residuals = zonal_moments(X.points, X.dimension, t)
    if np.any(residuals < NEGATIVE_FLOOR):
        worst = int(np.argmin(residuals))
        raise InternalConsistencyError(
            f"design residual r_{worst + 1} = {residuals[worst]:.3e} is below {NEGATIVE_FLOOR:g}"
        )
    return np.maximum(residuals, 0.0)


def total_residual(X: PointSet, t: int) -> float:
    return float(design_residual(X, t).sum())


def residual_gradient(X: PointSet, t: int) -> np.ndarray:
    """Gradient of total_residual(X, t), projected to each point's tangent space; shape (N, d+1)."""
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    _, grad = zonal_moments(X.points, X.dimension, t, gradient=True)
    return project_tangent(X.points, grad)
