"""
Least-squares fits that check remainder orders empirically.
"""

import math
from dataclasses import asdict, dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.stats import linregress

from ..core.errors import FitError

log = structlog.get_logger(__name__)

MIN_RECORDS = 4
# |residual| below ZERO_FRACTION * N^2 is treated as numerically zero
ZERO_FRACTION = 1e-12


@dataclass
class FitResult:
    """Slope and intercept of a log-log (or value vs log N) least-squares fit."""
    exponent: float
    intercept: float
    r_squared: float
    count: int
    excluded: int = 0
    model: str = "power"

    def to_dict(self) -> dict:
        return asdict(self)


def _pairs(records: Iterable) -> List[Tuple[float, float]]:
    pairs = []
    for record in records:
        if isinstance(record, (tuple, list)):
            n, residual = record
        else:
            n, residual = record.N, record.residual
        pairs.append((n, residual))
    return pairs


def _regress(x: np.ndarray, y: np.ndarray, excluded: int, model: str) -> FitResult:
    if x.size < MIN_RECORDS:
        raise FitError(f"fit needs at least {MIN_RECORDS} usable records, got {x.size}")
    if np.ptp(x) == 0:
        raise FitError("degenerate fit: all records have the same N")
    fit = linregress(x, y)
    if not math.isfinite(fit.slope):
        raise FitError("fitted exponent is not finite")
    return FitResult(
        exponent=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue ** 2),
        count=int(x.size),
        excluded=excluded,
        model=model,
    )


def fit_residual_exponent(records: Sequence[Union[Tuple[float, float], object]]) -> FitResult:
    """
    Fit log|residual| = exponent * log N + intercept.

    Accepts (N, residual) pairs or records with N and residual attributes;
    records without a residual, or with |residual| < 1e-12 N^2, are excluded.
    """
    pairs = _pairs(records)
    usable = [
        (n, r) for n, r in pairs
        if r is not None and math.isfinite(r) and abs(r) >= ZERO_FRACTION * n ** 2
    ]
    x = np.log(np.array([n for n, _ in usable], dtype=np.float64))
    y = np.log(np.abs(np.array([r for _, r in usable], dtype=np.float64)))
    result = _regress(x, y, len(pairs) - len(usable), "power")
    log.info("residual_exponent_fitted", exponent=result.exponent, r_squared=result.r_squared, count=result.count)
    return result


def fit_log_trend(N: Sequence[float], values: Sequence[float]) -> FitResult:
    """Fit values = slope * log N + intercept (a bounded quantity has slope near 0)."""
    n = np.asarray(N, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    keep = np.isfinite(v)
    result = _regress(np.log(n[keep]), v[keep], int((~keep).sum()), "log_trend")
    log.info("log_trend_fitted", slope=result.exponent, count=result.count)
    return result
