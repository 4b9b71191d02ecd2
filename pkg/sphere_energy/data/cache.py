"""
On-disk cache of kernel coefficients, keyed by a content hash of their parameters.
"""

import hashlib
import json
from pathlib import Path
from typing import Optional, Union

import structlog

from ..config import settings
from ..core.kernels import LOG, RIESZ, KernelCoefficients
from ..energy.energy import kernel_for

log = structlog.get_logger(__name__)


def kernel_key_fields(kind: str, s: Optional[float], lam: float, d: int, nmax: int) -> dict:
    return {
        "kind": kind,
        "s": None if kind == LOG or s is None else float(s),
        "lambda": float(lam),
        "d": int(d),
        "nmax": int(nmax),
    }


def kernel_cache_key(kind: str, s: Optional[float], lam: float, d: int, nmax: int) -> str:
    """SHA-256 of the canonical JSON of (kind, s, lambda, d, nmax)."""
    canonical = json.dumps(kernel_key_fields(kind, s, lam, d, nmax), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class KernelCache:
    """JSON files of KernelCoefficients under a cache directory."""

    def __init__(self, cache_dir: Optional[Union[str, Path]] = None):
        self.cache_dir = Path(cache_dir or settings.cache_dir)

    def path_for(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def load(self, kind: str, s: Optional[float], lam: float, d: int, nmax: int) -> Optional[KernelCoefficients]:
        """Cached coefficients, or None on a miss or a stale entry."""
        fields = kernel_key_fields(kind, s, lam, d, nmax)
        path = self.path_for(kernel_cache_key(kind, s, lam, d, nmax))
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
            stored = kernel_key_fields(data["kind"], data.get("s"), data["lambda"], data["d"], data["nmax"])
            if stored != fields:
                log.warning("kernel_cache_stale", path=str(path))
                return None
            return KernelCoefficients.from_dict(data)
        except (ValueError, KeyError, TypeError) as e:
            log.warning("kernel_cache_unreadable", path=str(path), error=str(e))
            return None

    def store(self, coeffs: KernelCoefficients) -> Path:
        key = kernel_cache_key(coeffs.kind, coeffs.s, coeffs.lam, coeffs.d, coeffs.nmax)
        path = self.path_for(key)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(coeffs.to_dict()))
        tmp.replace(path)
        return path

    def get(self, kind: str, lam: Optional[float], d: int, nmax: int, s: Optional[float] = None) -> KernelCoefficients:
        """Load from cache or compute and store."""
        if lam is None:
            lam = settings.default_riesz_lambda(s) if kind == RIESZ else settings.default_log_lambda(d)

        cached = self.load(kind, s, lam, d, nmax)
        if cached is not None:
            log.debug("kernel_cache_hit", kind=kind, s=s, lam=lam, d=d, nmax=nmax)
            return cached

        coeffs = kernel_for(kind, lam, d, nmax, s)
        self.store(coeffs)
        log.debug("kernel_cache_stored", kind=kind, s=s, lam=lam, d=d, nmax=nmax)
        return coeffs
