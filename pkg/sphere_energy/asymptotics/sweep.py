"""
N-sweeps: measured energies next to their asymptotic predictions.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import pandas as pd
import structlog

from ..core.errors import DomainError
from ..core.kernels import LOG, RIESZ
from ..data.sources import PointSetProvider
from ..energy.energy import log_energy, riesz_energy
from ..energy.summation import PairwiseSummation
from .predictions import AsymptoticPrediction, predict_log_energy, predict_riesz_energy

log = structlog.get_logger(__name__)

CSV_COLUMNS = ["t", "N", "d", "kind", "s", "measured", "leading", "second", "residual", "min_separation", "source"]


@dataclass
class SweepRecord:
    """One (point set, energy kind) measurement of a sweep."""
    t: Optional[int]
    N: Optional[int]
    d: int
    kind: str
    s: Optional[float]
    measured: Optional[float]
    leading: Optional[float]
    second: Optional[float]
    residual: Optional[float]
    min_separation: Optional[float]
    source: str
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def parse_kind(spec: str) -> Tuple[str, Optional[float]]:
    """'log' -> ('log', None); 'riesz:3' -> ('riesz', 3.0)."""
    name, _, exponent = spec.partition(":")
    name = name.strip().lower()
    if name == LOG and not exponent:
        return LOG, None
    if name == RIESZ and exponent:
        try:
            return RIESZ, float(exponent)
        except ValueError:
            pass
    raise DomainError(f"energy kind must be 'log' or 'riesz:<s>', got {spec!r}")


def _predict(kind: str, s: Optional[float], d: int, N: int, t: Optional[int]) -> AsymptoticPrediction:
    if kind == LOG:
        return predict_log_energy(d, N)
    return predict_riesz_energy(d, s, N, t)


def _measure(
    provider: PointSetProvider,
    kinds: Sequence[Tuple[str, Optional[float]]],
    t: Optional[int],
    N: Optional[int],
    path: Optional[str],
    summer: Optional[PairwiseSummation]
) -> List[SweepRecord]:
    source = provider.describe(t, N, path)
    try:
        X, _ = provider.get(t=t, N=N, path=path)
    except Exception as e:
        log.warning("sweep_source_failed", source=source, error=str(e))
        return [
            SweepRecord(t, N, provider.d, kind, s, None, None, None, None, None, source, error=str(e))
            for kind, s in kinds
        ]

    records = []
    for kind, s in kinds:
        record = SweepRecord(t, X.N, X.dimension, kind, s, None, None, None, None, None, source)
        try:
            report = log_energy(X, summer) if kind == LOG else riesz_energy(X, s, summer)
            record.measured = report.value
            record.min_separation = report.min_separation
            prediction = _predict(kind, s, X.dimension, X.N, t)
            record.leading = prediction.leading_term
            record.second = prediction.second_term
            record.residual = report.value - prediction.predicted
        except Exception as e:
            log.warning("sweep_record_failed", source=source, kind=kind, s=s, error=str(e))
            record.error = str(e)
        records.append(record)
    return records


def sweep(
    provider: PointSetProvider,
    kinds: Sequence[str],
    t_values: Optional[Sequence[int]] = None,
    N_values: Optional[Sequence[int]] = None,
    paths: Optional[Sequence[str]] = None,
    threads: int = 1,
    summer: Optional[PairwiseSummation] = None
) -> List[SweepRecord]:
    """
    Measure every kind on every configuration of the sweep range.

    Constructed designs range over t_values, files over paths (with matching
    t_values when given), generators over N_values. Failures become records
    with an error and the sweep continues.
    """
    parsed = [parse_kind(k) for k in kinds]
    if not parsed:
        raise DomainError("sweep needs at least one energy kind")

    if provider.source == "designs":
        configs = [(t, None, None) for t in (t_values or [])]
    elif provider.source == "files":
        paths = list(paths or [])
        ts = list(t_values) if t_values and len(t_values) == len(paths) else [None] * len(paths)
        configs = list(zip(ts, [None] * len(paths), paths))
    else:
        configs = [(None, N, None) for N in (N_values or [])]
    if not configs:
        raise DomainError("sweep range is empty")

    log.info("sweep_started", source=provider.source, configurations=len(configs), kinds=list(kinds))

    def run(config):
        t, N, path = config
        return _measure(provider, parsed, t, N, path, summer)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            batches = list(executor.map(run, configs))
    else:
        batches = [run(config) for config in configs]

    records = [record for batch in batches for record in batch]
    failed = sum(1 for r in records if r.error)
    log.info("sweep_finished", records=len(records), failed=failed)
    return records


def records_to_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
    """Records as a DataFrame in the fixed CSV column order."""
    frame = pd.DataFrame([r.to_dict() for r in records], columns=CSV_COLUMNS + ["error"])
    return frame
