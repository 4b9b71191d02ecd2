"""
Jacobi polynomials and the special-function identities built on them.

Evaluation uses the forward three-term recurrence

    2n(n+a+b)(2n+a+b-2) P_n = (2n+a+b-1)[(2n+a+b)(2n+a+b-2) x + a^2 - b^2] P_{n-1}
                              - 2(n+a-1)(n+b-1)(2n+a+b) P_{n-2}

with P_0 = 1 and P_1 = (a+1) + (a+b+2)(x-1)/2, normalized so that
P_n(1) = (a+1)_n / n!. Products of gamma functions are formed in log space.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class JacobiParams:
    """Parameters (alpha, beta) of P_n^(alpha, beta); both must exceed -1."""
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError(
                f"Jacobi parameters must exceed -1, got alpha={self.alpha}, beta={self.beta}"
            )

    @classmethod
    def symmetric(cls, alpha: float) -> "JacobiParams":
        return cls(alpha, alpha)

    @property
    def is_symmetric(self) -> bool:
        return self.alpha == self.beta

    def shifted(self, k: int = 1) -> "JacobiParams":
        return JacobiParams(self.alpha + k, self.beta + k)


# ============================================================
# GAMMA PRODUCTS
# ============================================================

def pochhammer_log(a: float, n) -> ArrayLike:
    """
    log (a)_n = log Gamma(n + a) - log Gamma(a), for a > 0.

    n may be an integer array. Callers that need a <= 0 use pochhammer_direct.
    """
    if a <= 0:
        raise DomainError(f"log-space Pochhammer symbol needs a > 0, got a={a}")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError("Pochhammer index must be >= 0")
    result = gammaln(n_arr + a) - gammaln(a)
    return float(result) if np.ndim(result) == 0 else result


def pochhammer_direct(a: float, n: int) -> float:
    """(a)_n as the finite product a (a+1) ... (a+n-1); (a)_0 = 1."""
    if n < 0:
        raise DomainError("Pochhammer index must be >= 0")
    return math.prod(a + k for k in range(n)) if n else 1.0


def gamma_ratio(n, a: float, b: float) -> ArrayLike:
    """Gamma(n + a) / Gamma(n + b) through log-gamma."""
    n_arr = np.asarray(n, dtype=np.float64)
    if np.any(n_arr + a <= 0) or np.any(n_arr + b <= 0):
        raise DomainError(f"gamma ratio has a pole: n + a and n + b must be > 0 (a={a}, b={b})")
    result = np.exp(gammaln(n_arr + a) - gammaln(n_arr + b))
    return float(result) if np.ndim(result) == 0 else result


# ============================================================
# EVALUATION
# ============================================================

def _recurrence_terms(n: int, alpha: float, beta: float, x):
    ab = alpha + beta
    a_ = 2 * n * (n + ab) * (2 * n + ab - 2)
    b_ = (2 * n + ab - 1) * ((2 * n + ab) * (2 * n + ab - 2) * x + alpha ** 2 - beta ** 2)
    c_ = 2 * (n + alpha - 1) * (n + beta - 1) * (2 * n + ab)
    return a_, b_, c_


def _check_domain(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > 1.0):
        raise DomainError("Jacobi evaluation requires |x| <= 1")
    return x


def _first(params: JacobiParams, x: np.ndarray) -> np.ndarray:
    return (params.alpha + 1) + (params.alpha + params.beta + 2) * (x - 1) / 2


def jacobi_eval(n: int, params: JacobiParams, x: ArrayLike) -> ArrayLike:
    """P_n^(alpha, beta)(x) for a scalar or array x in [-1, 1]."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    x = _check_domain(x)

    p_prev = np.ones_like(x)
    if n == 0:
        result = p_prev
    else:
        p_curr = _first(params, x)
        for k in range(2, n + 1):
            a_, b_, c_ = _recurrence_terms(k, params.alpha, params.beta, x)
            p_prev, p_curr = p_curr, (b_ * p_curr - c_ * p_prev) / a_
        result = p_curr
    return float(result) if result.ndim == 0 else result


def jacobi_batch(nmax: int, params: JacobiParams, x: ArrayLike) -> np.ndarray:
    """All degrees 0..nmax in one sweep; shape (nmax + 1,) + shape(x)."""
    if nmax < 0:
        raise DomainError(f"nmax must be >= 0, got {nmax}")
    x = _check_domain(x)

    table = np.empty((nmax + 1,) + x.shape)
    table[0] = 1.0
    if nmax >= 1:
        table[1] = _first(params, x)
    for k in range(2, nmax + 1):
        a_, b_, c_ = _recurrence_terms(k, params.alpha, params.beta, x)
        table[k] = (b_ * table[k - 1] - c_ * table[k - 2]) / a_
    return table


def jacobi_series(
    coefficients: np.ndarray,
    params: JacobiParams,
    x: ArrayLike,
    split: Optional[int] = None
) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """
    Sum_k coefficients[k] P_k(x) without materializing the degree table.

    With split = t returns (head, tail): degrees <= t and degrees > t.
    """
    coefficients = np.asarray(coefficients, dtype=np.float64)
    x = _check_domain(x)
    nmax = coefficients.shape[0] - 1
    cut = nmax if split is None else split

    head = np.full(x.shape, coefficients[0])
    tail = np.zeros(x.shape)

    p_prev = np.ones_like(x)
    p_curr = _first(params, x)
    for k in range(1, nmax + 1):
        if k >= 2:
            a_, b_, c_ = _recurrence_terms(k, params.alpha, params.beta, x)
            p_prev, p_curr = p_curr, (b_ * p_curr - c_ * p_prev) / a_
        if coefficients[k] == 0.0:
            continue
        if k <= cut:
            head += coefficients[k] * p_curr
        else:
            tail += coefficients[k] * p_curr

    if split is None:
        return head
    return head, tail


def jacobi_at_one(n, params: JacobiParams) -> ArrayLike:
    """P_n^(alpha, beta)(1) = Gamma(n + alpha + 1) / (Gamma(alpha + 1) n!)."""
    n_arr = np.asarray(n, dtype=np.float64)
    result = np.exp(gammaln(n_arr + params.alpha + 1) - gammaln(params.alpha + 1) - gammaln(n_arr + 1))
    return float(result) if np.ndim(result) == 0 else result


def jacobi_derivative(n: int, params: JacobiParams, x: ArrayLike) -> ArrayLike:
    """d/dx P_n^(a,b)(x) = ((a + b + n + 1) / 2) P_{n-1}^(a+1, b+1)(x); zero for n = 0."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    if n == 0:
        x = _check_domain(x)
        zero = np.zeros_like(x)
        return float(zero) if zero.ndim == 0 else zero
    scale = (params.alpha + params.beta + n + 1) / 2
    return scale * jacobi_eval(n - 1, params.shifted(), x)


# ============================================================
# CONNECTION AND ZONAL INTEGRALS
# ============================================================

def _log_gegenbauer_to_jacobi(n, lam: float):
    # P_n^(lam-1/2, lam-1/2) = [(lam + 1/2)_n / (2 lam)_n] C_n^lam
    return pochhammer_log(lam + 0.5, n) - pochhammer_log(2 * lam, n)


def connection_expand(n: int, lam: float, d: int) -> List[Tuple[int, float]]:
    """
    Coefficients c_k with

        P_n^(lam-1/2, lam-1/2)(x) = sum_k c_k P_{n-2k}^(d/2-1, d/2-1)(x),

    returned as (degree n - 2k, c_k) pairs for k = 0..floor(n/2).
    Requires lam > d/2 - 1/2 so every Pochhammer argument is positive.
    """
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    mu = (d - 1) / 2
    if d < 2 or lam <= mu:
        raise DomainError(f"connection formula needs d >= 2 and lambda > d/2 - 1/2, got lambda={lam}, d={d}")

    log_lead = _log_gegenbauer_to_jacobi(n, lam)
    terms = []
    for k in range(n // 2 + 1):
        m = n - 2 * k
        log_c = (
            log_lead - _log_gegenbauer_to_jacobi(m, mu)
            + pochhammer_log(lam - mu, k)
            + pochhammer_log(lam, n - k)
            + math.log(mu + m)
            - gammaln(k + 1)
            - pochhammer_log(mu, n - k + 1)
        )
        terms.append((m, math.exp(log_c)))
    return terms


def zonal_jacobi_integral(n, lam: float, d: int) -> ArrayLike:
    """
    Normalized zonal integral of P_n^(lam-1/2, lam-1/2) over S^d: zero for odd
    n, and for n = 2m

        [(lam + 1/2)_{2m} / (2 lam)_{2m}] (lam)_m (lam - d/2 + 1/2)_m / ((d/2 + 1/2)_m m!).
    """
    mu = (d - 1) / 2
    if d < 2 or lam <= mu:
        raise DomainError(f"zonal Jacobi integral needs lambda > d/2 - 1/2, got lambda={lam}, d={d}")

    n_arr = np.asarray(n, dtype=np.int64)
    m = n_arr // 2
    log_val = (
        _log_gegenbauer_to_jacobi(2 * m, lam)
        + pochhammer_log(lam, m)
        + pochhammer_log(lam - mu, m)
        - pochhammer_log(mu + 1, m)
        - gammaln(m + 1)
    )
    result = np.where(n_arr % 2 == 0, np.exp(log_val), 0.0)
    return float(result) if result.ndim == 0 else result
