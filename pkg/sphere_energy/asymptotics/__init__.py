"""Asymptotic predictions, sweeps and fits."""

from .predictions import AsymptoticPrediction, predict_log_energy, predict_riesz_energy
from .fitting import FitResult, fit_residual_exponent, fit_log_trend
from .sweep import SweepRecord, sweep

__all__ = [
    "AsymptoticPrediction",
    "predict_log_energy",
    "predict_riesz_energy",
    "FitResult",
    "fit_residual_exponent",
    "fit_log_trend",
    "SweepRecord",
    "sweep"
]
