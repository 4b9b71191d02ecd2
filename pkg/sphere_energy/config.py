"""
Configuration management using Pydantic settings.
Loads from environment variables (prefix SPHERE_ENERGY_) and .env files.
"""

from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SPHERE_ENERGY_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Persistence
    database_url: str = Field(
        default="sqlite:///./sphere_energy.db",
        description="Database connection URL for design and sweep runs"
    )
    persist_runs: bool = Field(default=True, description="Store constructed designs and sweeps in the database")
    cache_dir: Path = Field(
        default=Path(".sphere_energy_cache"),
        description="Directory for cached kernel coefficients"
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[str] = Field(default=None, description="Optional log file path")

    # Parallel summation
    threads: int = Field(default=1, ge=1, description="Worker threads for pairwise sums")
    deterministic: bool = Field(default=True, description="Fixed reduction order for pairwise sums")

    # Numerical defaults
    design_tolerance: float = Field(default=1e-8, gt=0, description="Total design residual tolerance")
    quadrature_tolerance: float = Field(default=1e-12, gt=0, description="Adaptive quadrature target")
    renormalize_threshold: float = Field(default=1e-8, gt=0, description="Max norm deviation fixed at load time")
    riesz_lambda_offset: float = Field(default=2.0, gt=0, description="Default lambda = s + offset")
    log_lambda_offset: float = Field(default=3.0, gt=1, description="Default lambda = d + offset")
    default_nmax: int = Field(default=2000, ge=1, description="Default series truncation degree")
    design_size_factor: float = Field(default=1.0, gt=0, description="N = ceil(c (t+1)^d) for constructed designs")

    @field_validator("persist_runs", "deterministic", mode="before")
    @classmethod
    def parse_bool(cls, v):
        """Parse booleans given as strings."""
        if isinstance(v, str):
            return v.lower() in ("true", "1", "yes", "on")
        return bool(v)

    def default_riesz_lambda(self, s: float) -> float:
        return s + self.riesz_lambda_offset

    def default_log_lambda(self, d: int) -> float:
        return d + self.log_lambda_offset


# Global settings instance
settings = Settings()
