"""
Jacobi-series expansions of the Riesz and logarithmic kernels.

Riesz:  (1 - x)^(-s/2) = sum_n a_n P_n^(lam-1/2, lam-1/2)(x),   lam > s - 1
Log:    log 1/(1 - x)  = C + sum_n b_n P_{n+1}^(lam-3/2, lam-3/2)(x),   lam > d + 1

where b_n = 2 a_n(s=2) / (n + 2 lam - 1) is the term-wise antiderivative of
the s = 2 series and C makes the series vanish at x = 0. Both series are stored
as one coefficient array indexed by the degree of the basis polynomial, so a
head/tail split at degree t is the same operation for both kinds.

On the sphere |x - y|^2 = 2 (1 - <x, y>), hence |x - y|^(-s) is 2^(-s/2) times
the Riesz series and log 1/|x - y| is half the log series minus log(2)/2.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import structlog
from scipy.special import gammaln

from .errors import DomainError
from .jacobi import JacobiParams, jacobi_eval, jacobi_series, pochhammer_log, zonal_jacobi_integral

log = structlog.get_logger(__name__)

RIESZ = "riesz"
LOG = "log"


@dataclass(frozen=True, eq=False)
class KernelCoefficients:
    """
    Coefficients of a kernel series in the basis P_k^(gamma, gamma), k = 0..nmax.

    gamma = lam - 1/2 for the Riesz kind and lam - 3/2 for the log kind; for the
    log kind coefficients[0] is 0 and the constant lives in constant_term.
    """
    kind: str
    lam: float
    d: int
    nmax: int
    coefficients: np.ndarray
    s: Optional[float] = None
    constant_term: float = 0.0
    constant_truncation: float = 0.0

    def __post_init__(self):
        if self.kind not in (RIESZ, LOG):
            raise DomainError(f"unknown kernel kind: {self.kind}")
        if self.kind == RIESZ and self.s is None:
            raise DomainError("riesz kernel needs s")
        coeffs = np.array(self.coefficients, dtype=np.float64)
        if coeffs.shape != (self.nmax + 1,):
            raise DomainError(f"expected {self.nmax + 1} coefficients, got {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)) or not math.isfinite(self.constant_term):
            raise DomainError("kernel coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def params(self) -> JacobiParams:
        shift = 0.5 if self.kind == RIESZ else 1.5
        return JacobiParams.symmetric(self.lam - shift)

    @property
    def distance_scale(self) -> float:
        """Factor turning the series of (1-x)^(-s/2) into |x-y|^(-s); 1 for log."""
        return 2.0 ** (-self.s / 2) if self.kind == RIESZ else 1.0

    def exact(self, x):
        """Closed-form kernel the series represents, for |x| < 1."""
        x = np.asarray(x, dtype=np.float64)
        if self.kind == RIESZ:
            return (1.0 - x) ** (-self.s / 2)
        return -np.log1p(-x)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "s": self.s,
            "lambda": self.lam,
            "d": self.d,
            "nmax": self.nmax,
            "constant_term": self.constant_term,
            "constant_truncation": self.constant_truncation,
            "coefficients": self.coefficients.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KernelCoefficients":
        return cls(
            kind=data["kind"],
            lam=float(data["lambda"]),
            d=int(data["d"]),
            nmax=int(data["nmax"]),
            coefficients=np.asarray(data["coefficients"], dtype=np.float64),
            s=None if data.get("s") is None else float(data["s"]),
            constant_term=float(data.get("constant_term", 0.0)),
            constant_truncation=float(data.get("constant_truncation", 0.0)),
        )


# ============================================================
# COEFFICIENTS
# ============================================================

def _check_riesz(s: float, lam: float):
    if s <= 0:
        raise DomainError(f"Riesz exponent s must be > 0, got {s}")
    if lam <= s - 1:
        raise DomainError(f"expansion of (1-x)^(-s/2) requires lambda > s - 1, got lambda={lam}, s={s}")
    if lam <= 0 or lam - s / 2 + 0.5 <= 0:
        raise DomainError(f"lambda={lam} puts a gamma argument at a pole for s={s}")


def _log_riesz_coefficients(s: float, lam: float, n: np.ndarray) -> np.ndarray:
    prefactor = (
        (2 * lam - s / 2) * math.log(2.0) - 0.5 * math.log(math.pi)
        + gammaln(lam) + gammaln(lam - s / 2 + 0.5)
    )
    return (
        prefactor
        + np.log(n + lam)
        + pochhammer_log(s / 2, n)
        + pochhammer_log(2 * lam, n)
        - gammaln(n + 2 * lam - s / 2 + 1)
        - pochhammer_log(lam + 0.5, n)
    )


def riesz_coefficients(s: float, lam: float, d: int, nmax: int) -> KernelCoefficients:
    """
    Gegenbauer expansion of (1 - x)^(-s/2):

        a_n = 2^(2 lam - s/2) pi^(-1/2) Gamma(lam) Gamma(lam - s/2 + 1/2)
              (n + lam) (s/2)_n (2 lam)_n / (Gamma(n + 2 lam - s/2 + 1) (lam + 1/2)_n)
    """
    _check_riesz(s, lam)
    if nmax < 0:
        raise DomainError(f"nmax must be >= 0, got {nmax}")
    n = np.arange(nmax + 1, dtype=np.float64)
    coeffs = np.exp(_log_riesz_coefficients(s, lam, n))
    log.debug("riesz_coefficients", s=s, lam=lam, d=d, nmax=nmax)
    return KernelCoefficients(kind=RIESZ, lam=float(lam), d=int(d), nmax=int(nmax), coefficients=coeffs, s=float(s))


def log_coefficients(lam: float, d: int, nmax: int) -> KernelCoefficients:
    """
    Series of log 1/(1 - x) obtained by integrating the s = 2 expansion from 0:
    degree n + 1 carries 2 a_n(s=2) / (n + 2 lam - 1), and the constant term is
    minus the series at 0, truncated at nmax with a tail estimate.
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if lam <= d + 1:
        raise DomainError(f"log-kernel expansion requires lambda > d + 1, got lambda={lam}, d={d}")
    if nmax < 1:
        raise DomainError(f"log series needs nmax >= 1, got {nmax}")

    n = np.arange(nmax, dtype=np.float64)
    b = np.exp(_log_riesz_coefficients(2.0, lam, n) + math.log(2.0) - np.log(n + 2 * lam - 1))
    coeffs = np.concatenate([[0.0], b])
    params = JacobiParams.symmetric(lam - 1.5)

    at_zero = float(jacobi_series(coeffs, params, 0.0))
    constant = -at_zero
    truncation = _remainder_estimate(coeffs, params, 0.0)
    log.debug("log_coefficients", lam=lam, d=d, nmax=nmax, constant=constant, truncation=truncation)
    return KernelCoefficients(
        kind=LOG, lam=float(lam), d=int(d), nmax=int(nmax), coefficients=coeffs,
        constant_term=constant, constant_truncation=truncation
    )


def _remainder_estimate(coeffs: np.ndarray, params: JacobiParams, x: float) -> float:
    """
    Size of the neglected terms beyond the last degree, from the decay ratio
    of the last two nonzero terms summed as a geometric series.
    """
    nmax = coeffs.shape[0] - 1
    terms = []
    k = nmax
    while k >= 1 and len(terms) < 2:
        term = abs(coeffs[k] * jacobi_eval(k, params, x))
        if term > 0.0:
            terms.append(term)
        k -= 1
    if len(terms) < 2:
        return 0.0 if not terms else terms[0]
    last, previous = terms
    ratio = last / previous
    if ratio >= 1.0:
        return math.inf
    return last * ratio / (1.0 - ratio)


# ============================================================
# HEAD / TAIL
# ============================================================

def _check_split(coeffs: KernelCoefficients, t: int):
    if not 0 <= t <= coeffs.nmax:
        raise DomainError(f"split degree t={t} must lie in [0, nmax={coeffs.nmax}]")


def kernel_head_eval(coeffs: KernelCoefficients, t: int, x):
    """Degrees <= t of the series (plus the constant term for log) at x."""
    _check_split(coeffs, t)
    head = jacobi_series(coeffs.coefficients[: t + 1], coeffs.params, x)
    return head + coeffs.constant_term


def kernel_tail_eval(coeffs: KernelCoefficients, t: int, x):
    """Degrees t+1..nmax of the series at x, for |x| < 1."""
    _check_split(coeffs, t)
    if np.any(np.abs(np.asarray(x)) >= 1.0):
        raise DomainError("kernel tail is evaluated only for |x| < 1")
    _, tail = jacobi_series(coeffs.coefficients, coeffs.params, x, split=t)
    return tail


def kernel_split_eval(coeffs: KernelCoefficients, t: int, x):
    """(head, tail) in a single recurrence sweep."""
    _check_split(coeffs, t)
    head, tail = jacobi_series(coeffs.coefficients, coeffs.params, x, split=t)
    return head + coeffs.constant_term, tail


def tail_remainder_estimate(coeffs: KernelCoefficients, x: float) -> float:
    """Estimated size of the series beyond nmax at a single point x."""
    estimate = _remainder_estimate(coeffs.coefficients, coeffs.params, float(x))
    return estimate + coeffs.constant_truncation


# ============================================================
# EXACT INTEGRALS OF THE HEAD
# ============================================================

def head_integral(s: float, lam: float, d: int, t: int) -> float:
    """
    Normalized integral over S^d of H_{s,t}(<x, y>), the degree <= t head of
    |x - y|^(-s). Only even degrees contribute:

        2^(2 lam - s) pi^(-1/2) Gamma(lam) Gamma(lam - s/2 + 1/2)
        sum_{m <= t/2} (2m + lam) (s/2)_{2m} / Gamma(2m + 2 lam - s/2 + 1)
                       * (lam)_m (lam - d/2 + 1/2)_m / ((d/2 + 1/2)_m m!)
    """
    _check_riesz(s, lam)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    even = np.arange(0, t + 1, 2, dtype=np.int64)
    terms = np.exp(_log_riesz_coefficients(s, lam, even.astype(np.float64))) * zonal_jacobi_integral(even, lam, d)
    return 2.0 ** (-s / 2) * math.fsum(terms)


def log_head_integral(coeffs: KernelCoefficients, t: int) -> float:
    """
    Normalized integral over S^d of the log head (constant term plus degrees
    1..t of the log 1/(1 - x) series).
    """
    if coeffs.kind != LOG:
        raise DomainError("log_head_integral needs log-kind coefficients")
    _check_split(coeffs, t)
    even = np.arange(2, t + 1, 2, dtype=np.int64)
    # basis P_k^(lam-3/2) is the lam-1 member of the zonal family
    moments = zonal_jacobi_integral(even, coeffs.lam - 1.0, coeffs.d) if even.size else np.zeros(0)
    return coeffs.constant_term + math.fsum(coeffs.coefficients[even] * moments)
