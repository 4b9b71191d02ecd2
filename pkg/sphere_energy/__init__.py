"""
Sphere Energy - discrete energies and spherical t-designs on S^d.

This package provides:
- Energy: logarithmic and Riesz s-energies with a parallel, reproducible pair sum
- Designs: certification and construction of well-separated spherical t-designs
- Kernels: Jacobi/Gegenbauer expansions split into exactly integrated heads and tails
- Asymptotics: predicted energy laws, N-sweeps and remainder-order fits
"""

__version__ = "1.0.0"
__author__ = "Sphere Energy Team"
