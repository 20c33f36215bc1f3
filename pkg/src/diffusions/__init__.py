"""
Diffusions Module

Transition kernels and extreme-value laws of noncolliding particles:
- kernels: heat kernels, Karlin-McGregor determinants, survival, de Bruijn
- densities: GUE and class-C marginals of the bridges
- extremes: the four limit laws, general endpoints, N = 1 closed forms
- width: width distribution and height moments
"""

from src.diffusions.densities import classC_density, gue_density, sigma_bridge
from src.diffusions.extremes import (
    CdfEvaluation,
    ProcessKind,
    ProcessTag,
    bessel_height_n1_series,
    bridge_range_n1_series,
    cdf_bessel_H,
    cdf_bridge_joint_LR,
    cdf_general,
    cdf_meander_H,
    cdf_motion_joint_LR,
    evaluate_grid,
    meander_height_n1_series,
    verify_prefactor_signs,
)
from src.diffusions.kernels import (
    Chamber,
    DeBruijnResult,
    IntervalGeometry,
    Kernel,
    OrderedConfiguration,
    absorbing_halfline,
    absorbing_interval,
    de_bruijn_pfaffian,
    heat_kernel,
    km_determinant,
    km_matrix,
    survival_A,
    survival_C,
)
from src.diffusions.width import cdf_width, height_moment_from_cdf, height_moment_n1

__all__ = [
    "CdfEvaluation",
    "Chamber",
    "DeBruijnResult",
    "IntervalGeometry",
    "Kernel",
    "OrderedConfiguration",
    "ProcessKind",
    "ProcessTag",
    "absorbing_halfline",
    "absorbing_interval",
    "bessel_height_n1_series",
    "bridge_range_n1_series",
    "cdf_bessel_H",
    "cdf_bridge_joint_LR",
    "cdf_general",
    "cdf_meander_H",
    "cdf_motion_joint_LR",
    "cdf_width",
    "classC_density",
    "de_bruijn_pfaffian",
    "evaluate_grid",
    "gue_density",
    "heat_kernel",
    "height_moment_from_cdf",
    "height_moment_n1",
    "km_determinant",
    "km_matrix",
    "meander_height_n1_series",
    "sigma_bridge",
    "survival_A",
    "survival_C",
    "verify_prefactor_signs",
]
