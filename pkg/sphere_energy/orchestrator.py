"""
High-level orchestrator for energy, design and sweep workflows.

This module coordinates:
- Energies of point sets, with the optional kernel split
- Design verification and construction
- Kernel tables and asymptotic predictions
- Sweeps and residual fits
- Database persistence of constructed designs and sweeps
"""

import hashlib
import json
import threading
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog

from .asymptotics.fitting import FitResult, fit_log_trend, fit_residual_exponent
from .asymptotics.predictions import predict_log_energy, predict_riesz_energy
from .asymptotics.sweep import SweepRecord, parse_kind, records_to_frame, sweep
from .config import settings
from .core.errors import DomainError
from .core.geometry import PointSet, save_point_set
from .core.kernels import LOG, RIESZ, kernel_split_eval
from .data.cache import KernelCache
from .data.sources import PointSetProvider
from .db.db import get_session, init_db
from .db.models import DesignRun as DesignRunModel
from .db.models import SweepRecordRow as SweepRecordModel
from .db.models import SweepRun as SweepRunModel
from .designs.certificate import DesignCertificate, verify_design
from .designs.constructor import ConstructionOptions, DesignConstructor, default_design_size
from .energy.energy import kernel_split_energy, log_energy, quadrature_exactness, riesz_energy
from .energy.summation import PairwiseSummation

log = structlog.get_logger(__name__)


def options_hash(options: ConstructionOptions) -> str:
    """Content hash of the options that change a constructed design (threads excluded)."""
    payload = options.model_dump(exclude={"threads"})
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Orchestrator:
    """
    High-level orchestrator for sphere-energy workflows.

    Responsibilities:
    - Wrap the library operations behind one call per CLI subcommand
    - Reuse constructed designs through the database
    - Persist constructed designs and sweep runs
    """

    def __init__(
        self,
        persist: Optional[bool] = None,
        threads: Optional[int] = None,
        deterministic: Optional[bool] = None,
        cache_dir: Optional[str] = None
    ):
        self.persist = settings.persist_runs if persist is None else persist
        self.summer = PairwiseSummation(
            threads=threads or settings.threads,
            deterministic=settings.deterministic if deterministic is None else deterministic,
        )
        self.kernel_cache = KernelCache(cache_dir)
        # sweep threads share one SQLite file; one session at a time
        self._db_lock = threading.Lock()
        if self.persist:
            try:
                init_db()
            except Exception as e:
                log.error("database_unavailable", error=str(e))
                self.persist = False

    def _to_jsonable(self, obj):
        if isinstance(obj, dict):
            return {k: self._to_jsonable(v) for k, v in obj.items()}
        elif isinstance(obj, (list, tuple)):
            return [self._to_jsonable(v) for v in obj]
        elif isinstance(obj, np.ndarray):
            return self._to_jsonable(obj.tolist())
        elif hasattr(obj, "to_dict"):
            return self._to_jsonable(obj.to_dict())
        elif isinstance(obj, (np.floating, np.integer, np.bool_)):
            return obj.item()
        elif isinstance(obj, float) and not np.isfinite(obj):
            return None
        elif isinstance(obj, (datetime,)):
            return obj.isoformat()
        elif isinstance(obj, Path):
            return str(obj)
        else:
            return obj

    def to_safe_json(self, data):
        return json.loads(json.dumps(self._to_jsonable(data)))

    # ---------------------------
    # Energy / verification
    # ---------------------------
    def run_energy(
        self,
        X: PointSet,
        kind: str,
        s: Optional[float] = None,
        t: Optional[int] = None,
        lam: Optional[float] = None,
        nmax: Optional[int] = None
    ) -> Dict[str, Any]:
        """
        Energy of X; with t also the head/tail split and the quadrature
        exactness of the head kernel.
        """
        if kind == LOG:
            report = log_energy(X, self.summer)
        elif kind == RIESZ:
            if s is None:
                raise DomainError("riesz energy needs --s")
            report = riesz_energy(X, s, self.summer)
        else:
            raise DomainError(f"unknown energy kind: {kind}")

        result = report.to_dict()
        if t is not None:
            nmax = nmax or settings.default_nmax
            coeffs = self.kernel_cache.get(kind, lam, X.dimension, nmax, s)
            split = kernel_split_energy(X, kind, coeffs.lam, t, nmax, s, coeffs=coeffs, summer=self.summer)
            exactness = quadrature_exactness(X, coeffs, t, self.summer)
            result["split"] = split.to_dict()
            result["quadrature"] = exactness.to_dict()
            result["split_discrepancy"] = split.total - report.value
            result.update(method=f"kernel_split({coeffs.lam:g}, {t})", lam=coeffs.lam, t=t)
        return self.to_safe_json(result)

    def run_verify(
        self,
        X: PointSet,
        t: int,
        tolerance: Optional[float] = None,
        spot_checks: int = 8,
        seed: int = 0
    ) -> Dict[str, Any]:
        certificate = verify_design(X, t, tolerance, spot_checks, seed)
        return self.to_safe_json(certificate)

    # ---------------------------
    # Design construction
    # ---------------------------
    def lookup_design(
        self,
        d: int,
        t: int,
        N: Optional[int] = None,
        seed: int = 0,
        options: Optional[ConstructionOptions] = None
    ) -> Tuple[PointSet, DesignCertificate]:
        """Stored design for (d, t, N, seed, options) if any, else construct and store it."""
        options = options or ConstructionOptions()
        N = N or default_design_size(d, t)
        cached = self._load_design(d, t, N, seed, options)
        if cached is not None:
            return cached
        result = DesignConstructor(d, t, N, options).construct(seed)
        self._save_design(d, t, N, seed, options, result)
        return result.point_set, result.certificate

    def run_construct(
        self,
        d: int,
        t: int,
        N: Optional[int] = None,
        seed: int = 0,
        options: Optional[ConstructionOptions] = None,
        output: Optional[str] = None,
        reuse: bool = True
    ) -> Dict[str, Any]:
        """
        Construct (or reuse) a design and optionally write it as a point-set file.

        Returns:
            certificate, restart summaries and the written path
        """
        options = options or ConstructionOptions()
        N = N or default_design_size(d, t)

        restarts: List[dict] = []
        cached = self._load_design(d, t, N, seed, options) if reuse else None
        if cached is not None:
            X, certificate = cached
        else:
            result = DesignConstructor(d, t, N, options).construct(seed)
            self._save_design(d, t, N, seed, options, result)
            X, certificate = result.point_set, result.certificate
            restarts = [o.summary() for o in result.restarts]

        path = None
        if output:
            header = {
                "d": d, "t": t, "N": X.N, "seed": seed,
                "verdict": certificate.verdict,
                "total_residual": f"{certificate.total_residual:.6e}",
            }
            path = save_point_set(output, X, header)
            log.info("design_written", path=str(path), N=X.N)

        return self.to_safe_json({
            "certificate": certificate,
            "restarts": restarts,
            "reused": cached is not None,
            "output": path,
        })

    def _load_design(
        self, d: int, t: int, N: int, seed: int, options: ConstructionOptions
    ) -> Optional[Tuple[PointSet, DesignCertificate]]:
        if not self.persist:
            return None
        try:
            with self._db_lock, get_session() as session:
                row = (
                    session.query(DesignRunModel)
                    .filter_by(d=d, t=t, n_points=N, seed=seed, options_hash=options_hash(options))
                    .order_by(DesignRunModel.created_at.desc())
                    .first()
                )
                if row is None:
                    return None
                X = PointSet.from_array(np.asarray(row.points, dtype=np.float64), d, label=f"stored design {row.id}")
                certificate = DesignCertificate(**row.certificate)
            log.info("design_reused", d=d, t=t, N=N, seed=seed)
            return X, certificate
        except Exception as e:
            log.error("design_lookup_failed", error=str(e))
            return None

    def _save_design(self, d: int, t: int, N: int, seed: int, options: ConstructionOptions, result) -> Optional[str]:
        if not self.persist:
            return None
        try:
            with self._db_lock, get_session() as session:
                row = DesignRunModel(
                    d=d, t=t, n_points=N, seed=seed,
                    options_hash=options_hash(options),
                    options=options.model_dump(),
                    points=result.point_set.points.tolist(),
                    certificate=self.to_safe_json(result.certificate),
                    verdict=result.certificate.verdict,
                    total_residual=result.certificate.total_residual,
                    success=result.success,
                    elapsed_seconds=result.elapsed_seconds,
                )
                session.add(row)
                session.flush()
                log.info("design_persisted", id=row.id, d=d, t=t, N=N)
                return row.id
        except Exception as e:
            log.error("design_persist_failed", error=str(e))
            return None

    # ---------------------------
    # Kernels / predictions
    # ---------------------------
    def run_kernel(
        self,
        kind: str,
        d: int,
        t: int,
        s: Optional[float] = None,
        lam: Optional[float] = None,
        nmax: Optional[int] = None,
        grid: int = 101
    ) -> pd.DataFrame:
        """
        Head and tail of the kernel series on an interior grid of (-1, 1), next
        to the closed-form kernel, all in the |x - y| normalization.
        """
        if grid < 1:
            raise DomainError(f"grid must be >= 1, got {grid}")
        nmax = nmax or settings.default_nmax
        coeffs = self.kernel_cache.get(kind, lam, d, nmax, s)
        x = -1.0 + 2.0 * np.arange(1, grid + 1) / (grid + 1)
        head, tail = kernel_split_eval(coeffs, t, x)
        scale = coeffs.distance_scale
        exact = scale * coeffs.exact(x)
        if coeffs.kind == LOG:
            # log 1/|x - y| = (1/2) log 1/(1 - x) - (1/2) log 2
            scale, exact = 0.5, 0.5 * coeffs.exact(x) - 0.5 * np.log(2.0)
            head = head - np.log(2.0)
        frame = pd.DataFrame({
            "x": x,
            "head": scale * head,
            "tail": scale * tail,
            "exact": exact,
        })
        frame["error"] = frame["head"] + frame["tail"] - frame["exact"]
        return frame

    def run_predict(
        self,
        kind: str,
        d: int,
        N: int,
        s: Optional[float] = None,
        t: Optional[int] = None
    ) -> Dict[str, Any]:
        if kind == LOG:
            prediction = predict_log_energy(d, N)
        elif kind == RIESZ:
            if s is None:
                raise DomainError("riesz prediction needs --s")
            prediction = predict_riesz_energy(d, s, N, t)
        else:
            raise DomainError(f"unknown energy kind: {kind}")
        return self.to_safe_json(prediction)

    # ---------------------------
    # Sweeps / fits
    # ---------------------------
    def run_sweep(
        self,
        source: str,
        d: int,
        kinds: Sequence[str],
        t_values: Optional[Sequence[int]] = None,
        N_values: Optional[Sequence[int]] = None,
        paths: Optional[Sequence[str]] = None,
        seed: int = 0,
        options: Optional[ConstructionOptions] = None,
        threads: int = 1,
        fit: bool = False
    ) -> Tuple[List[SweepRecord], Optional[Dict[str, Any]]]:
        """
        Run a sweep, optionally fit the residual exponent per kind, and persist it.

        Returns:
            (records, fits keyed by kind label or None)
        """
        provider = PointSetProvider(
            source=source, d=d, seed=seed, options=options,
            design_lookup=self.lookup_design if source == "designs" else None,
        )
        started = datetime.utcnow()
        records = sweep(provider, kinds, t_values, N_values, paths, threads, self.summer)

        fits = None
        if fit:
            fits = {}
            for label in kinds:
                kind, s = parse_kind(label)
                subset = [r for r in records if r.kind == kind and r.s == s and r.residual is not None]
                try:
                    fits[label] = fit_residual_exponent(subset).to_dict()
                except Exception as e:
                    log.warning("sweep_fit_failed", kind=label, error=str(e))
                    fits[label] = {"error": str(e)}

        self._save_sweep(source, d, kinds, started, records, fits, {
            "t_values": list(t_values or []), "N_values": list(N_values or []),
            "paths": list(paths or []), "seed": seed,
        })
        return records, fits

    def _save_sweep(
        self,
        source: str,
        d: int,
        kinds: Sequence[str],
        started: datetime,
        records: Sequence[SweepRecord],
        fits: Optional[Dict[str, Any]],
        config: Dict[str, Any]
    ) -> Optional[str]:
        if not self.persist:
            return None
        try:
            with get_session() as session:
                run = SweepRunModel(
                    source=source, d=d, kinds=list(kinds), config=self.to_safe_json(config),
                    started_at=started, finished_at=datetime.utcnow(),
                    fit=self.to_safe_json(fits) if fits else None,
                )
                session.add(run)
                session.flush()
                for r in records:
                    session.add(SweepRecordModel(
                        sweep_id=run.id, t=r.t, n_points=r.N, d=r.d, kind=r.kind, s=r.s,
                        measured=r.measured, leading=r.leading, second=r.second, residual=r.residual,
                        min_separation=r.min_separation, source=r.source, error=r.error,
                    ))
                log.info("sweep_persisted", id=run.id, records=len(records))
                return run.id
        except Exception as e:
            log.error("sweep_persist_failed", error=str(e))
            return None

    def run_fit(
        self,
        csv_path: str,
        model: str = "power",
        kind: Optional[str] = None,
        normalize_power: float = 2.0
    ) -> FitResult:
        """
        Fit a sweep CSV.

        power:     log|residual| against log N
        log_trend: residual / N^normalize_power against log N
        """
        frame = pd.read_csv(csv_path)
        missing = {"N", "residual"} - set(frame.columns)
        if missing:
            raise DomainError(f"sweep CSV lacks columns: {sorted(missing)}")
        if kind:
            name, s = parse_kind(kind)
            frame = frame[frame["kind"] == name]
            if s is not None:
                frame = frame[np.isclose(frame["s"].astype(float), s)]
        if "error" in frame.columns:
            frame = frame[frame["error"].isna()]
        frame = frame.dropna(subset=["N", "residual"])

        started = time.perf_counter()
        if model == "power":
            result = fit_residual_exponent(list(zip(frame["N"].astype(float), frame["residual"].astype(float))))
        elif model == "log_trend":
            n = frame["N"].astype(float).to_numpy()
            result = fit_log_trend(n, frame["residual"].to_numpy(dtype=float) / n ** normalize_power)
        else:
            raise DomainError(f"unknown fit model: {model}")
        log.debug("fit_finished", model=model, seconds=round(time.perf_counter() - started, 4))
        return result

    @staticmethod
    def records_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
        return records_to_frame(records)
