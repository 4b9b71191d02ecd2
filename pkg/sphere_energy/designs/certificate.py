"""
Design certificates: residuals, separation and a monomial spot-check.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import structlog
from scipy.special import gammaln

from ..config import settings
from ..core.errors import DomainError
from ..core.geometry import PointSet, min_separation
from .residual import design_residual

log = structlog.get_logger(__name__)

PASS = "pass"
FAIL = "fail"


@dataclass
class DesignCertificate:
    """Outcome of checking X against the t-design property."""
    t: int
    N: int
    d: int
    per_degree_residuals: List[float]
    total_residual: float
    min_separation: Optional[float]
    separation_constant: Optional[float]
    verdict: str
    tolerance: float
    spot_check: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return asdict(self)


def monomial_sphere_integral(exponents: Sequence[int]) -> float:
    """
    Normalized integral of prod_i x_i^(a_i) over S^d, d = len(exponents) - 1:
    zero if any a_i is odd, else

        Gamma((d+1)/2) prod_i Gamma((a_i+1)/2) / (pi^((d+1)/2) Gamma((|a| + d + 1)/2)).
    """
    a = np.asarray(exponents, dtype=np.int64)
    if a.ndim != 1 or a.size < 3 or np.any(a < 0):
        raise DomainError("exponents must be a vector of >= 3 nonnegative integers")
    if np.any(a % 2):
        return 0.0
    m = a.size  # = d + 1
    log_value = (
        gammaln(m / 2) + np.sum(gammaln((a + 1) / 2))
        - (m / 2) * math.log(math.pi) - gammaln((a.sum() + m) / 2)
    )
    return float(np.exp(log_value))


def _random_exponents(rng: np.random.Generator, dim: int, t: int) -> np.ndarray:
    degree = int(rng.integers(1, t + 1))
    # a uniformly random composition of degree into dim nonnegative parts
    cuts = np.sort(rng.integers(0, degree + 1, size=dim - 1))
    return np.diff(np.concatenate([[0], cuts, [degree]]))


def monomial_spot_check(X: PointSet, t: int, count: int = 8, seed: int = 0) -> Dict[str, Any]:
    """Largest |equal-weight mean - exact integral| over count random monomials of degree <= t."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        a = _random_exponents(rng, X.ambient_dim, t)
        mean = float(np.mean(np.prod(X.points ** a, axis=1)))
        worst = max(worst, abs(mean - monomial_sphere_integral(a)))
    return {"monomials": count, "max_error": worst}


def verify_design(
    X: PointSet,
    t: int,
    tolerance: Optional[float] = None,
    spot_checks: int = 8,
    seed: int = 0
) -> DesignCertificate:
    """
    Certify X as a t-design: pass iff the total residual is within tolerance.

    The monomial spot-check allows errors up to 10 * sqrt(tolerance), since the
    residual is quadratic in the moment errors.
    """
    tolerance = settings.design_tolerance if tolerance is None else tolerance
    if tolerance <= 0:
        raise DomainError(f"tolerance must be > 0, got {tolerance}")

    residuals = design_residual(X, t)
    total = float(residuals.sum())
    sep = min_separation(X) if X.N >= 2 else None
    constant = sep * X.N ** (1.0 / X.dimension) if sep is not None else None
    verdict = PASS if total <= tolerance else FAIL

    spot = monomial_spot_check(X, t, spot_checks, seed) if spot_checks else {}
    if spot:
        spot["threshold"] = 10.0 * math.sqrt(tolerance)
        spot["passed"] = spot["max_error"] <= spot["threshold"]
        if verdict == PASS and not spot["passed"]:
            log.warning("spot_check_disagrees", t=t, N=X.N, max_error=spot["max_error"], total_residual=total)

    log.info("design_verified", d=X.dimension, t=t, N=X.N, total_residual=total, verdict=verdict)
    return DesignCertificate(
        t=t, N=X.N, d=X.dimension,
        per_degree_residuals=residuals.tolist(),
        total_residual=total,
        min_separation=sep,
        separation_constant=constant,
        verdict=verdict,
        tolerance=tolerance,
        spot_check=spot,
    )
