"""
Exception hierarchy shared by all sphere_energy modules.
"""

from typing import Optional, Sequence, Tuple


class SphereEnergyError(Exception):
    """Base class for every error raised by the package."""


class PointSetFormatError(SphereEnergyError, ValueError):
    """A point-set file or array could not be turned into a PointSet."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DomainError(SphereEnergyError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class SingularInputError(SphereEnergyError, ValueError):
    """Input makes a kernel or energy singular (coincident or antipodal points)."""

    def __init__(self, message: str, pairs: Sequence[Tuple[int, int]] = ()):
        self.pairs = [tuple(int(i) for i in p) for p in pairs]
        if self.pairs:
            shown = ", ".join(f"({i}, {j})" for i, j in self.pairs[:5])
            more = "" if len(self.pairs) <= 5 else f" and {len(self.pairs) - 5} more"
            message = f"{message}; offending pairs: {shown}{more}"
        super().__init__(message)


class QuadratureError(SphereEnergyError, ArithmeticError):
    """Adaptive quadrature did not reach its target accuracy."""

    def __init__(self, message: str, achieved_error: float):
        self.achieved_error = float(achieved_error)
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")


class RootFindingError(SphereEnergyError, ArithmeticError):
    """A bracketing root finder could not bracket or converge."""


class FitError(SphereEnergyError, ValueError):
    """Fit input is insufficient or degenerate."""


class InternalConsistencyError(SphereEnergyError, RuntimeError):
    """A quantity that is nonnegative in exact arithmetic came out clearly negative."""
