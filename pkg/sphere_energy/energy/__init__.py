"""Pairwise summation engine and energies."""

from .summation import CompensatedSum, PairwiseSummation
from .energy import (
    EnergyReport,
    SplitEnergy,
    log_energy,
    riesz_energy,
    continuous_log_energy,
    kernel_split_energy,
    quadrature_exactness
)

__all__ = [
    "CompensatedSum",
    "PairwiseSummation",
    "EnergyReport",
    "SplitEnergy",
    "log_energy",
    "riesz_energy",
    "continuous_log_energy",
    "kernel_split_energy",
    "quadrature_exactness"
]
