"""
Zonal integration on S^d.

Integrals of the form

    c_d * int_a^b f(t) (1 - t^2)^(d/2 - 1) dt,   c_d = Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2)),

which is the normalized surface integral of f(<x, y>) over the sphere. Both
halves of [-1, 1] are mapped with 1 - t = u^2 (upper) and 1 + t = v^2 (lower)
so the weight and endpoint singularities of the integrand become smooth or
weakly singular in u, v; the result is refined adaptively with Gauss-Legendre
panels under a global error budget.
"""

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import DomainError, QuadratureError

GL_ORDER = 30
DEFAULT_TOLERANCE = 1e-12
MAX_PANELS = 20000

_NODES, _WEIGHTS = leggauss(GL_ORDER)


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an adaptive integral with its error estimate."""
    value: float
    error: float
    panels: int


def sphere_normalization(d: int) -> float:
    """c_d = Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2))."""
    return math.exp(gammaln((d + 1) / 2) - 0.5 * math.log(math.pi) - gammaln(d / 2))


def _panel(g: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    values = g(0.5 * (a + b) + half * _NODES)
    if not np.all(np.isfinite(values)):
        raise QuadratureError(f"integrand not finite on panel [{a:.3e}, {b:.3e}]", math.inf)
    return half * float(np.dot(_WEIGHTS, values))


def _refine(g, a: float, b: float):
    mid = 0.5 * (a + b)
    coarse = _panel(g, a, b)
    fine = _panel(g, a, mid) + _panel(g, mid, b)
    return fine, abs(fine - coarse)


def adaptive_gauss_legendre(
    g: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = DEFAULT_TOLERANCE,
    max_panels: int = MAX_PANELS,
    initial_panels: int = 2
) -> QuadratureResult:
    """
    Integrate g over [a, b] by splitting the worst panel until the summed error
    estimate falls below tol * max(1, |value|).

    Raises:
        QuadratureError: if max_panels is reached first.
    """
    if b <= a:
        return QuadratureResult(0.0, 0.0, 0)

    edges = np.linspace(a, b, initial_panels + 1)
    heap = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _refine(g, float(lo), float(hi))
        heapq.heappush(heap, (-err, float(lo), float(hi), val))

    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)

    while total_err > tol * max(1.0, abs(total)):
        if len(heap) >= max_panels:
            raise QuadratureError("adaptive refinement did not converge", total_err)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # panel can no longer be split in double precision
            raise QuadratureError("panel width underflow", total_err)
        left = _refine(g, lo, mid)
        right = _refine(g, mid, hi)
        heapq.heappush(heap, (-left[1], lo, mid, left[0]))
        heapq.heappush(heap, (-right[1], mid, hi, right[0]))
        total += left[0] + right[0] - val
        total_err += left[1] + right[1] + neg_err

    value = math.fsum(item[3] for item in heap)
    error = math.fsum(-item[0] for item in heap)
    return QuadratureResult(value, error, len(heap))


def _weight(w: np.ndarray, d: int) -> np.ndarray:
    # (1 - t^2)^(d/2 - 1) with 1 - t^2 = w^2 (2 - w^2), w = u or v
    return (w * w * (2.0 - w * w)) ** (0.5 * d - 1.0)


def zonal_integral_with_error(
    f: Callable[[np.ndarray], np.ndarray],
    d: int,
    lower: float = -1.0,
    upper: float = 1.0,
    tol: float = DEFAULT_TOLERANCE,
    gap: bool = False
) -> QuadratureResult:
    """
    Normalized zonal integral of f over t in [lower, upper], with error estimate.

    f must accept numpy arrays. Integrable endpoint singularities at t = +-1
    (logarithmic, or algebraic weaker than the weight) are supported. With
    gap=True f is called with 1 - t, formed without cancellation near t = 1.
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if not -1.0 <= lower <= upper <= 1.0:
        raise DomainError(f"integration range [{lower}, {upper}] not inside [-1, 1]")

    value = 0.0
    error = 0.0
    panels = 0

    if upper > 0.0:
        lo = max(lower, 0.0)
        u_lo = math.sqrt(max(1.0 - upper, 0.0))
        u_hi = math.sqrt(1.0 - lo)

        def g_upper(u):
            return (f(u * u) if gap else f(1.0 - u * u)) * _weight(u, d) * 2.0 * u

        res = adaptive_gauss_legendre(g_upper, u_lo, u_hi, tol=0.5 * tol)
        value += res.value
        error += res.error
        panels += res.panels

    if lower < 0.0:
        hi = min(upper, 0.0)
        v_lo = math.sqrt(max(1.0 + lower, 0.0))
        v_hi = math.sqrt(1.0 + hi)

        def g_lower(v):
            return (f(2.0 - v * v) if gap else f(v * v - 1.0)) * _weight(v, d) * 2.0 * v

        res = adaptive_gauss_legendre(g_lower, v_lo, v_hi, tol=0.5 * tol)
        value += res.value
        error += res.error
        panels += res.panels

    c_d = sphere_normalization(d)
    return QuadratureResult(c_d * value, c_d * error, panels)


def zonal_integral(
    f: Callable[[np.ndarray], np.ndarray],
    d: int,
    lower: float = -1.0,
    upper: float = 1.0,
    tol: float = DEFAULT_TOLERANCE,
    gap: bool = False
) -> float:
    """
    Normalized surface integral of f(<x, y>) over S^d (restricted to
    lower <= <x, y> <= upper). f = 1 integrates to 1.
    """
    return zonal_integral_with_error(f, d, lower, upper, tol, gap).value
