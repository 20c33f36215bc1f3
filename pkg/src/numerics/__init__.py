"""
Numerics Module

Deterministic numerical building blocks:
- specfun: Hermite polynomials, Hermite-theta series, erf integrals, zeta/xi
- matalg: determinants and pfaffians of small dense matrices
- quad: adaptive 1D and ordered-simplex 2D quadrature
"""

from src.numerics.matalg import (
    AntisymmetricMatrix,
    determinant,
    determinant_sensitivity,
    log_determinant,
    log_pfaffian,
    pad_skew,
    pfaffian,
    pfaffian_sensitivity,
)
from src.numerics.quad import QuadResult, integrate_1d, integrate_ordered_2d
from src.numerics.specfun import (
    SeriesValue,
    hermite,
    poisson_lhs,
    poisson_prefactor,
    psi,
    psi2,
    riemann_xi,
    riemann_zeta,
    theta,
    theta_dual,
    theta_series,
    theta_values,
)

__all__ = [
    "AntisymmetricMatrix",
    "QuadResult",
    "SeriesValue",
    "determinant",
    "determinant_sensitivity",
    "hermite",
    "integrate_1d",
    "integrate_ordered_2d",
    "log_determinant",
    "log_pfaffian",
    "pad_skew",
    "pfaffian",
    "pfaffian_sensitivity",
    "poisson_lhs",
    "poisson_prefactor",
    "psi",
    "psi2",
    "riemann_xi",
    "riemann_zeta",
    "theta",
    "theta_dual",
    "theta_series",
    "theta_values",
]
