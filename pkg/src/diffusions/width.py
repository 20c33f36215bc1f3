"""
Width distribution and height moments

The width W = R - L of the noncolliding Brownian bridge, obtained from the
joint law of (L, R), and moments of the maximum height H.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from src.config import DEFAULT_TOL, Process
from src.diffusions.extremes import (
    CdfEvaluation,
    cdf_bessel_H,
    cdf_bridge_joint_LR,
    cdf_meander_H,
    finalize,
)
from src.diffusions.kernels import IntervalGeometry
from src.errors import DomainError, NonPositiveTime, ToleranceNotMet
from src.numerics.quad import integrate_1d
from src.numerics.specfun import riemann_xi

logger = logging.getLogger(__name__)

# Richardson agreement demanded of the derivative
DERIVATIVE_RTOL = 1e-6
# Quadrature accuracy for integrals of differentiated or nested CDFs
NESTED_TOL = 1e-9


# =============================================================================
# Width
# =============================================================================

def _left_derivative(
    N: int, T: float, ell: float, r: float, tol: float
) -> tuple[float, float]:
    """
    ∂F/∂ℓ at (ℓ, r) for F = P(-ℓ < L, R < r), by central differences
    extrapolated over three halvings of the step.
    """
    step = min(1e-3 * math.sqrt(T), ell / 4.0, r / 4.0)

    def central(h: float) -> float:
        upper = cdf_bridge_joint_LR(N, T, ell + h, r, tol).raw
        lower = cdf_bridge_joint_LR(N, T, ell - h, r, tol).raw
        return (upper - lower) / (2.0 * h)

    d1, d2, d3 = central(step), central(step / 2.0), central(step / 4.0)
    first = (4.0 * d2 - d1) / 3.0
    second = (4.0 * d3 - d2) / 3.0
    gap = abs(second - first)
    if gap > DERIVATIVE_RTOL * max(1.0, abs(second)):
        raise ToleranceNotMet(
            f"width derivative at ell={ell:.6g}: extrapolants differ by {gap:.3e}"
        )
    return second, gap


def cdf_width(N: int, T: float, w: float, tol: float = DEFAULT_TOL) -> CdfEvaluation:
    """
    P(W < w) for N noncolliding Brownian bridges.

    Since P(-ℓ < L, R < r) vanishes at r = 0, conditioning on -L gives

        P(W < w) = ∫_0^w ∂_ℓ F(ℓ, w - ℓ) dℓ.
    """
    if not T > 0:
        raise NonPositiveTime(f"T must be positive, got {T}")
    if not (w > 0 and math.isfinite(w)):
        raise DomainError(f"w must be positive and finite, got {w}")
    worst_gap = 0.0

    def integrand(ells: NDArray[np.float64]) -> NDArray[np.float64]:
        nonlocal worst_gap
        out = np.empty_like(ells)
        for idx, ell in np.ndenumerate(ells):
            value, gap = _left_derivative(N, T, float(ell), w - float(ell), tol)
            out[idx] = value
            worst_gap = max(worst_gap, gap)
        return out

    result = integrate_1d(integrand, 0.0, w, max(tol, NESTED_TOL))
    error = result.error_estimate + w * worst_gap
    logger.debug("width N=%d w=%.4g: %d evaluations", N, w, result.evaluations)
    return finalize(result.value, error, N, T, IntervalGeometry(0.0, w, T))


# =============================================================================
# Height moments
# =============================================================================

def height_moment_n1(m: float, T: float) -> float:
    """E[H^m] for one Bessel bridge: 2 (πT/2)^{m/2} ξ(m)."""
    if not m > 1:
        raise DomainError(f"moment order must exceed 1, got {m}")
    if not T > 0:
        raise NonPositiveTime(f"T must be positive, got {T}")
    return 2.0 * (0.5 * math.pi * T) ** (0.5 * m) * riemann_xi(m)


def height_moment_from_cdf(
    m: float,
    N: int,
    T: float,
    process: Process = Process.BESSEL,
    tol: float = DEFAULT_TOL,
) -> float:
    """
    E[H^m] = ∫_0^∞ m h^{m-1} (1 - F(h)) dh for the Bessel bridge or meander.

    The integral is cut where 1 - F is below double precision.
    """
    if not m > 1:
        raise DomainError(f"moment order must exceed 1, got {m}")
    if process is Process.BESSEL:
        cdf = cdf_bessel_H
    elif process is Process.MEANDER:
        cdf = cdf_meander_H
    else:
        raise DomainError(f"height moments are defined for bessel and meander, not {process.value}")
    h_max = math.sqrt(T) * (12.0 + 2.0 * N)

    def integrand(hs: NDArray[np.float64]) -> NDArray[np.float64]:
        out = np.empty_like(hs)
        for idx, h in np.ndenumerate(hs):
            if h <= 0.0:
                out[idx] = 0.0
                continue
            survival = 1.0 - cdf(N, T, float(h), tol).value
            out[idx] = m * float(h) ** (m - 1.0) * survival
        return out

    # moments scale like T^{m/2}
    result = integrate_1d(integrand, 0.0, h_max, max(tol, NESTED_TOL) * max(1.0, T ** (0.5 * m)))
    logger.debug("height moment m=%g N=%d: %d evaluations", m, N, result.evaluations)
    return result.value
