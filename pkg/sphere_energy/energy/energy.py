"""
Discrete logarithmic and Riesz energies, the continuous log energy of the
uniform measure, and the head/tail kernel-split decomposition.

Energies follow the ordered-pair conventions

    E_log(X) = sum_{i != j} log 1/|x_i - x_j|
    E_s(X)   = (1/2) sum_{i != j} |x_i - x_j|^(-s)
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, Optional

import numpy as np
import structlog
from scipy.special import digamma

from ..config import settings
from ..core.errors import DomainError, SingularInputError
from ..core.geometry import PointSet, antipodal_pairs, coincident_pairs, extreme_inner_products, min_separation
from ..core.kernels import (
    LOG,
    RIESZ,
    KernelCoefficients,
    head_integral,
    kernel_head_eval,
    kernel_split_eval,
    log_coefficients,
    log_head_integral,
    riesz_coefficients,
    tail_remainder_estimate,
)
from ..core.quadrature import zonal_integral
from .summation import PairBlock, PairwiseSummation

log = structlog.get_logger(__name__)

# |x_i + x_j| below this counts as an antipodal pair for the kernel split
ANTIPODAL_TOLERANCE = 1.5e-6


@dataclass
class EnergyReport:
    """Result of an energy computation."""
    kind: str
    value: float
    N: int
    d: int
    method: str
    deterministic: bool
    min_separation: float
    s: Optional[float] = None
    lam: Optional[float] = None
    t: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def default_summer() -> PairwiseSummation:
    return PairwiseSummation(threads=settings.threads, deterministic=settings.deterministic)


def _check_pairs(X: PointSet, allow_empty: bool = False) -> float:
    """Validate X for a pair sum and return its minimum separation."""
    if X.N < 2:
        if allow_empty:
            return math.inf
        raise DomainError("energy of fewer than 2 points is an empty sum")
    duplicates = coincident_pairs(X)
    if duplicates:
        raise SingularInputError("point set contains coincident points", duplicates)
    return min_separation(X)


def log_energy(X: PointSet, summer: Optional[PairwiseSummation] = None, allow_empty: bool = False) -> EnergyReport:
    """sum_{i != j} log 1/|x_i - x_j| over ordered pairs."""
    sep = _check_pairs(X, allow_empty)
    summer = summer or default_summer()
    value = 0.0 if X.N < 2 else summer.sum(X, lambda block: -np.log(block.distances()))
    log.debug("log_energy", N=X.N, d=X.dimension, value=value)
    return EnergyReport(
        kind=LOG, value=value, N=X.N, d=X.dimension, method="direct",
        deterministic=summer.deterministic, min_separation=sep
    )


def log_energy_inner_form(X: PointSet, summer: Optional[PairwiseSummation] = None) -> float:
    """The same energy written as (1/2) sum_{i != j} (log 1/(1 - <x_i, x_j>) - log 2)."""
    _check_pairs(X)
    summer = summer or default_summer()
    return summer.sum(X, lambda block: 0.5 * (-np.log1p(-block.inner()) - math.log(2.0)))


def riesz_energy(X: PointSet, s: float, summer: Optional[PairwiseSummation] = None) -> EnergyReport:
    """(1/2) sum_{i != j} |x_i - x_j|^(-s)."""
    if s <= 0:
        raise DomainError(f"Riesz exponent s must be > 0, got {s}")
    sep = _check_pairs(X)
    summer = summer or default_summer()
    value = summer.sum(X, lambda block: 0.5 * block.distances() ** (-s))
    log.debug("riesz_energy", N=X.N, d=X.dimension, s=s, value=value)
    return EnergyReport(
        kind=RIESZ, value=value, N=X.N, d=X.dimension, method="direct",
        deterministic=summer.deterministic, min_separation=sep, s=float(s)
    )


def continuous_log_energy(d: int, tol: Optional[float] = None) -> float:
    """
    Log energy of the normalized uniform measure on S^d,
    int int log 1/|x - y| dsigma dsigma, from the zonal integral of
    -(1/2) log(2 (1 - t)).
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    tol = tol or settings.quadrature_tolerance
    return zonal_integral(lambda gap: -0.5 * np.log(2.0 * gap), d, tol=tol, gap=True)


def continuous_log_energy_closed_form(d: int) -> float:
    """-log 2 + (psi(d) - psi(d/2)) / 2."""
    return -math.log(2.0) + 0.5 * (digamma(d) - digamma(d / 2))


# ============================================================
# KERNEL SPLIT
# ============================================================

@dataclass
class SplitEnergy:
    """Head and tail parts of an energy under the degree-t kernel split."""
    head: float
    tail: float
    kind: str
    lam: float
    t: int
    nmax: int
    remainder_estimate: float
    s: Optional[float] = None

    @property
    def total(self) -> float:
        return self.head + self.tail

    def __iter__(self) -> Iterator[float]:
        yield self.head
        yield self.tail

    def to_dict(self) -> dict:
        data = asdict(self)
        data["total"] = self.total
        return data


def kernel_for(kind: str, lam: Optional[float], d: int, nmax: int, s: Optional[float] = None) -> KernelCoefficients:
    """Build coefficients for kind, filling lam from the configured defaults."""
    if kind == RIESZ:
        if s is None:
            raise DomainError("riesz kernel needs s")
        lam = settings.default_riesz_lambda(s) if lam is None else lam
        return riesz_coefficients(s, lam, d, nmax)
    if kind == LOG:
        lam = settings.default_log_lambda(d) if lam is None else lam
        return log_coefficients(lam, d, nmax)
    raise DomainError(f"unknown energy kind: {kind}")


def _check_split_input(X: PointSet):
    duplicates = coincident_pairs(X)
    if duplicates:
        raise SingularInputError("kernel split is undefined at <x_i, x_j> = 1", duplicates)
    opposite = antipodal_pairs(X, tol=ANTIPODAL_TOLERANCE)
    if opposite:
        raise SingularInputError("kernel split is undefined at <x_i, x_j> = -1 (antipodal pair)", opposite)


def kernel_split_energy(
    X: PointSet,
    kind: str,
    lam: Optional[float],
    t: int,
    nmax: int,
    s: Optional[float] = None,
    coeffs: Optional[KernelCoefficients] = None,
    summer: Optional[PairwiseSummation] = None
) -> SplitEnergy:
    """
    Split the energy of X into the degree <= t head and the degree > t tail
    of the kernel's Jacobi series, truncated at nmax.

    Riesz: E_head = (1/2) sum_{i != j} H_{s,t}(<x_i, x_j>), H_{s,t} including the
    2^(-s/2) distance factor. Log: E_head = (1/2) sum_{i != j} H_{log,t} - (N^2 - N) log(2) / 2.
    """
    if X.N < 2:
        raise DomainError("kernel split needs at least 2 points")
    coeffs = coeffs or kernel_for(kind, lam, X.dimension, nmax, s)
    _check_split_input(X)
    summer = summer or default_summer()

    scale = 0.5 * coeffs.distance_scale

    def term(block: PairBlock) -> np.ndarray:
        head, tail = kernel_split_eval(coeffs, t, block.inner())
        return scale * np.stack([head, tail])

    head, tail = summer.sum(X, term)
    if coeffs.kind == LOG:
        head -= 0.5 * (X.N ** 2 - X.N) * math.log(2.0)

    largest, smallest = extreme_inner_products(X)
    worst = largest if abs(largest) >= abs(smallest) else smallest
    remainder = (X.N ** 2 - X.N) * scale * tail_remainder_estimate(coeffs, worst)

    log.debug("kernel_split_energy", kind=coeffs.kind, t=t, nmax=coeffs.nmax, head=head, tail=tail)
    return SplitEnergy(
        head=head, tail=tail, kind=coeffs.kind, lam=coeffs.lam, t=t, nmax=coeffs.nmax,
        remainder_estimate=remainder, s=coeffs.s
    )


@dataclass
class QuadratureExactness:
    """Discrete mean of the head kernel against its exact integral."""
    discrete_mean: float
    integral: float
    t: int

    @property
    def relative_gap(self) -> float:
        return abs(self.discrete_mean - self.integral) / max(abs(self.integral), np.finfo(float).tiny)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["relative_gap"] = self.relative_gap
        return data


def quadrature_exactness(
    X: PointSet,
    coeffs: KernelCoefficients,
    t: int,
    summer: Optional[PairwiseSummation] = None
) -> QuadratureExactness:
    """
    (1/N^2) sum_{i, j} H_t(<x_i, x_j>), diagonal included, next to the
    integral of H_t over the sphere. The two agree for a t-design.
    """
    summer = summer or default_summer()
    scale = coeffs.distance_scale

    def term(block: PairBlock) -> np.ndarray:
        return scale * kernel_head_eval(coeffs, t, block.inner())

    mean = summer.sum(X, term, include_diagonal=True) / X.N ** 2
    if coeffs.kind == RIESZ:
        integral = head_integral(coeffs.s, coeffs.lam, coeffs.d, t)
    else:
        integral = log_head_integral(coeffs, t)
    return QuadratureExactness(discrete_mean=mean, integral=integral, t=t)
