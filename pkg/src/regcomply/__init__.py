"""Compliance measures of weighted l1 regularizers for k-sparse recovery.

Exact descent-cone solid angles in three dimensions, Monte Carlo cone
fractions in any dimension, RIP-based necessary and sufficient measures, and a
search over weight vectors with optimality certificates.
"""

__version__ = "0.1.0"

from .geometry import (
    SolidAngle,
    cone_areas_3d,
    compliance_nonuniform_3d,
    compliance_uniform_3d,
    descent_cone_area_3d,
    published_cone_area,
    tetra_solid_angle,
)
from .ksupport import KSupportNorm, ksupport_norm, ksupport_norm_oracle, ksupport_norm_sq
from .model import (
    DomainError,
    SignedSupport,
    SparsityModel,
    WeightVector,
    model_descent_set_contains,
    normalize_weights,
    signed_descent_cone_contains,
)
from .optimize import optimality_certificate, optimize_weights
from .oracle import brute_B_sigma, brute_cone_area_3d, brute_D_sigma, brute_gamma_projector
from .rip import (
    B_L_ell1,
    B_sigma,
    ComplianceReport,
    D_L_ell1,
    D_sigma,
    delta_from_gamma,
    delta_nec,
    delta_suff,
    gamma_sigma,
)
from .sampling import EstimateWithError, estimate_cone_fraction, mc_compliance
from .search import SearchConfig

__all__ = [
    "B_L_ell1",
    "B_sigma",
    "ComplianceReport",
    "D_L_ell1",
    "D_sigma",
    "DomainError",
    "EstimateWithError",
    "KSupportNorm",
    "SearchConfig",
    "SignedSupport",
    "SolidAngle",
    "SparsityModel",
    "WeightVector",
    "brute_B_sigma",
    "brute_D_sigma",
    "brute_cone_area_3d",
    "brute_gamma_projector",
    "compliance_nonuniform_3d",
    "compliance_uniform_3d",
    "cone_areas_3d",
    "delta_from_gamma",
    "delta_nec",
    "delta_suff",
    "descent_cone_area_3d",
    "estimate_cone_fraction",
    "gamma_sigma",
    "ksupport_norm",
    "ksupport_norm_oracle",
    "ksupport_norm_sq",
    "mc_compliance",
    "model_descent_set_contains",
    "normalize_weights",
    "optimality_certificate",
    "optimize_weights",
    "published_cone_area",
    "signed_descent_cone_contains",
    "tetra_solid_angle",
]
