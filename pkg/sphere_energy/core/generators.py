"""
Baseline point-set generators used for comparisons and as optimizer starts.
"""

import numpy as np
import structlog

from .errors import DomainError
from .geometry import PointSet

log = structlog.get_logger(__name__)

GOLDEN_RATIO = (1 + np.sqrt(5)) / 2


def generate_random_uniform(d: int, N: int, seed=None) -> PointSet:
    """
    N independent uniform points on S^d (normalized Gaussian vectors).

    seed may be an int, a numpy SeedSequence or a Generator.
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = rng.standard_normal((N, d + 1))
    norms = np.linalg.norm(pts, axis=1)
    # a zero Gaussian vector has probability zero; redraw just in case
    while np.any(norms == 0.0):
        zero = norms == 0.0
        pts[zero] = rng.standard_normal((int(zero.sum()), d + 1))
        norms = np.linalg.norm(pts, axis=1)

    return PointSet(dimension=d, points=pts / norms[:, None], label=f"random(d={d}, N={N})")


def generate_fibonacci(N: int, d: int = 2) -> PointSet:
    """
    Golden-ratio (Fibonacci) lattice on S^2, offset by half a step so no point
    sits on a pole. Deterministic for fixed N.
    """
    if d != 2:
        raise DomainError(f"Fibonacci lattice is only defined on S^2, got d={d}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")

    i = np.arange(N, dtype=np.float64) + 0.5
    x0, _ = np.modf(i / GOLDEN_RATIO)
    z = 1.0 - 2.0 * i / N

    theta = 2 * np.pi * x0
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))

    xyz = np.column_stack([r * np.cos(theta), r * np.sin(theta), z])
    return PointSet.from_array(xyz, 2, label=f"fibonacci(N={N})")
