"""
Point-set provider - unified interface for files, generators and constructed designs.
"""

from pathlib import Path
from typing import Callable, Literal, Optional, Tuple

import structlog

from ..core.errors import DomainError
from ..core.generators import generate_fibonacci, generate_random_uniform
from ..core.geometry import PointSet, load_point_set
from ..designs.certificate import DesignCertificate
from ..designs.constructor import ConstructionOptions, construct_design

log = structlog.get_logger(__name__)

SourceKind = Literal["designs", "files", "fibonacci", "random"]
DesignLookup = Callable[..., Tuple[PointSet, DesignCertificate]]


class PointSetProvider:
    """
    Unified point-set provider.

    Supports:
    - constructed designs (optionally served from a persistent cache)
    - point-set files in the text format
    - Fibonacci lattices on S^2
    - seeded uniform random sets
    """

    def __init__(
        self,
        source: SourceKind = "designs",
        d: int = 2,
        seed: int = 0,
        options: Optional[ConstructionOptions] = None,
        design_lookup: Optional[DesignLookup] = None
    ):
        """
        Args:
            source: Point-set source type
            d: Sphere dimension
            seed: Seed for constructed and random sets
            options: Construction options for the designs source
            design_lookup: Replaces construct_design, e.g. with a cached version
        """
        if source not in ("designs", "files", "fibonacci", "random"):
            raise DomainError(f"Unknown point-set source: {source}")
        self.source = source
        self.d = d
        self.seed = seed
        self.options = options
        self.design_lookup = design_lookup or construct_design

    def get(
        self,
        t: Optional[int] = None,
        N: Optional[int] = None,
        path: Optional[str] = None
    ) -> Tuple[PointSet, Optional[DesignCertificate]]:
        """
        Resolve one point set.

        Returns:
            (PointSet, certificate) - the certificate is None for sources that
            are not constructed designs
        """
        if self.source == "designs":
            if t is None:
                raise DomainError("designs source needs t")
            return self.design_lookup(d=self.d, t=t, N=N, seed=self.seed, options=self.options)

        if self.source == "files":
            if not path:
                raise DomainError("path required for files source")
            return load_point_set(Path(path), self.d), None

        if N is None:
            raise DomainError(f"{self.source} source needs N")
        if self.source == "fibonacci":
            return generate_fibonacci(N, self.d), None
        return generate_random_uniform(self.d, N, self.seed), None

    def describe(self, t: Optional[int] = None, N: Optional[int] = None, path: Optional[str] = None) -> str:
        if self.source == "files":
            return f"file:{path}"
        if self.source == "designs":
            return f"design:t={t}" + (f",N={N}" if N else "")
        return f"{self.source}:N={N}"
