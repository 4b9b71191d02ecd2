"""Core geometry, special functions and kernel expansions."""

from .errors import (
    SphereEnergyError,
    PointSetFormatError,
    DomainError,
    SingularInputError,
    QuadratureError,
    RootFindingError,
    FitError,
    InternalConsistencyError
)
from .geometry import PointSet, CapSpec, load_point_set, save_point_set, min_separation
from .generators import generate_fibonacci, generate_random_uniform
from .jacobi import JacobiParams, jacobi_eval, jacobi_batch
from .kernels import KernelCoefficients, riesz_coefficients, log_coefficients

__all__ = [
    "SphereEnergyError",
    "PointSetFormatError",
    "DomainError",
    "SingularInputError",
    "QuadratureError",
    "RootFindingError",
    "FitError",
    "InternalConsistencyError",
    "PointSet",
    "CapSpec",
    "load_point_set",
    "save_point_set",
    "min_separation",
    "generate_fibonacci",
    "generate_random_uniform",
    "JacobiParams",
    "jacobi_eval",
    "jacobi_batch",
    "KernelCoefficients",
    "riesz_coefficients",
    "log_coefficients"
]
