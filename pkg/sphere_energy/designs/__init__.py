"""Design residuals, certificates and construction."""

from .residual import design_residual, total_residual, residual_gradient
from .certificate import DesignCertificate, verify_design
from .constructor import ConstructionOptions, DesignConstructor, construct_design

__all__ = [
    "design_residual",
    "total_residual",
    "residual_gradient",
    "DesignCertificate",
    "verify_design",
    "ConstructionOptions",
    "DesignConstructor",
    "construct_design"
]
