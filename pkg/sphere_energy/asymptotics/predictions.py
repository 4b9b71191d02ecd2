"""
Asymptotic predictors for the energies of well-separated spherical designs.

Log kernel:   E_log(X) = V_log N^2 - (1/d) N log N + O(N)
Riesz s = d:  E_d(X) = (1/(2 sqrt(pi))) Gamma((d+1)/2)/Gamma(d/2) H_{[t/2]} N^2 + O(N^2)
Riesz s > d:  E_s(X) << N^(1 + s/d)   (order only, no constant)

H_m is the harmonic number sum_{n=1}^m 1/n.
"""

import math
from functools import lru_cache
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from scipy.special import gammaln

from ..core.errors import DomainError
from ..core.kernels import LOG, RIESZ
from ..energy.energy import continuous_log_energy


@dataclass
class AsymptoticPrediction:
    """Leading and second-order terms of a predicted energy."""
    kind: str
    N: int
    d: int
    leading_term: float
    second_term: float
    remainder_order: str
    t: Optional[int] = None
    s: Optional[float] = None
    bound_only: bool = False
    references: Dict[str, Any] = field(default_factory=dict)
    predicted: float = field(init=False)

    def __post_init__(self):
        self.predicted = self.leading_term + self.second_term

    def to_dict(self) -> dict:
        return asdict(self)


def harmonic_number(m: int) -> float:
    return math.fsum(1.0 / n for n in range(1, m + 1))


def _gamma_half_ratio(d: int) -> float:
    # Gamma(d/2 + 1/2) / Gamma(d/2)
    return math.exp(gammaln(d / 2 + 0.5) - gammaln(d / 2))


def limit_constant_s_equals_d(d: int) -> float:
    """lim E_d / (N^2 log N) = Gamma(d/2 + 1/2) / (2 d sqrt(pi) Gamma(d/2))."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    return _gamma_half_ratio(d) / (2 * d * math.sqrt(math.pi))


def minimal_energy_constant(d: int) -> float:
    """Minimal-energy constant (1/(2d)) Gamma((d+1)/2) / (Gamma(d/2) Gamma(1/2))."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    return math.exp(gammaln((d + 1) / 2) - gammaln(d / 2) - gammaln(0.5)) / (2 * d)


@lru_cache(maxsize=None)
def _continuous_log_energy(d: int) -> float:
    return continuous_log_energy(d)


def predict_log_energy(d: int, N: int) -> AsymptoticPrediction:
    """V_log(S^d) N^2 - (1/d) N log N, remainder O(N)."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    v_log = _continuous_log_energy(d)
    return AsymptoticPrediction(
        kind=LOG, N=N, d=d,
        leading_term=v_log * N ** 2,
        second_term=-(1.0 / d) * N * math.log(N),
        remainder_order="O(N)",
        references={"continuous_energy": v_log},
    )


def predict_riesz_energy(d: int, s: float, N: int, t: Optional[int] = None) -> AsymptoticPrediction:
    """
    s = d: harmonic-number law in t with an O(N^2) remainder (t >= 2).
    s > d: the order envelope N^(1 + s/d), flagged bound_only.
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if s < d:
        raise DomainError(f"Riesz prediction needs s >= d, got s={s}, d={d}")

    if s > d:
        exponent = 1.0 + s / d
        return AsymptoticPrediction(
            kind=RIESZ, N=N, d=d, t=t, s=float(s),
            leading_term=float(N) ** exponent,
            second_term=0.0,
            remainder_order=f"O(N^{exponent:g})",
            bound_only=True,
        )

    if t is None or t < 2:
        raise DomainError(f"the s = d prediction needs the design strength t >= 2, got t={t}")

    coefficient = _gamma_half_ratio(d) / (2 * math.sqrt(math.pi)) * harmonic_number(t // 2)
    limit = limit_constant_s_equals_d(d)
    references: Dict[str, Any] = {
        "coefficient": coefficient,
        "limit_constant": limit,
        "minimal_energy_constant": minimal_energy_constant(d),
        "limit_term": limit * N ** 2 * math.log(N) if N > 1 else 0.0,
    }
    if d == 2:
        # d = 2 form with sum_{k=0}^{t} 1/(k+1); agrees with the above only up to O(N^2)
        shifted = 0.25 * harmonic_number(t + 1)
        references["shifted_sum_coefficient"] = shifted
        references["shifted_sum_term"] = shifted * N ** 2

    return AsymptoticPrediction(
        kind=RIESZ, N=N, d=d, t=t, s=float(s),
        leading_term=coefficient * N ** 2,
        second_term=0.0,
        remainder_order="O(N^2)",
        references=references,
    )
