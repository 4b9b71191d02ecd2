"""Point-set sources and the kernel-coefficient cache."""

from .sources import PointSetProvider
from .cache import KernelCache

__all__ = ["PointSetProvider", "KernelCache"]
