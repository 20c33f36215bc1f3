"""
Reference densities

The bridge standard deviation σ_T(t) and the eigenvalue densities that give
the marginals of the noncolliding bridges at time t: GUE for type A and
the class-C ensemble for type C, both with variance σ_T(t)².
"""

import math

import numpy as np
from scipy.special import gammaln

from src.diffusions.kernels import Chamber, OrderedConfiguration
from src.errors import ChamberMismatch, DomainError, NonPositiveTime, OutOfWindow


def sigma_bridge(t: float, T: float) -> float:
    """σ_T(t) = √(t(1 - t/T)), the standard deviation of a Brownian bridge at t."""
    if not T > 0:
        raise NonPositiveTime(f"duration must be positive, got {T}")
    if not 0 <= t <= T:
        raise OutOfWindow(f"t={t} outside [0, {T}]")
    return math.sqrt(max(0.0, t * (1.0 - t / T)))


def _check_variance(sigma2: float) -> None:
    if not sigma2 > 0:
        raise DomainError(f"variance must be positive, got {sigma2}")


def _log_vandermonde(values: np.ndarray) -> float:
    diffs = values[None, :] - values[:, None]
    upper = diffs[np.triu_indices(len(values), k=1)]
    return float(np.sum(np.log(upper)))


def gue_density(x: OrderedConfiguration, sigma2: float) -> float:
    """
    q(x; σ²) = σ^{-N²} / ((2π)^{N/2} Π_{k=1}^N Γ(k)) e^{-|x|²/2σ²} Π_{i<j} (x_j - x_i)²

    on the ordered chamber.
    """
    _check_variance(sigma2)
    if x.chamber is not Chamber.TYPE_A:
        raise ChamberMismatch("gue_density takes a type A configuration")
    n = x.N
    xs = x.array
    log_q = (
        -0.5 * n * n * math.log(sigma2)
        - 0.5 * n * math.log(2.0 * math.pi)
        - float(np.sum(gammaln(np.arange(1, n + 1))))
        - float(xs @ xs) / (2.0 * sigma2)
        + 2.0 * _log_vandermonde(xs)
    )
    return math.exp(log_q)


def classC_density(x: OrderedConfiguration, sigma2: float) -> float:
    """
    q(x; σ²) = σ^{-N(2N+1)} / ((π/2)^{N/2} Π_{k=1}^N Γ(2k))
               e^{-|x|²/2σ²} Π_{i<j} (x_j² - x_i²)² Π_k x_k²
    """
    _check_variance(sigma2)
    if x.chamber is not Chamber.TYPE_C:
        raise ChamberMismatch("classC_density takes a type C configuration")
    n = x.N
    xs = x.array
    log_q = (
        -0.5 * n * (2 * n + 1) * math.log(sigma2)
        - 0.5 * n * math.log(0.5 * math.pi)
        - float(np.sum(gammaln(2.0 * np.arange(1, n + 1))))
        - float(xs @ xs) / (2.0 * sigma2)
        + 2.0 * _log_vandermonde(xs * xs)
        + 2.0 * float(np.sum(np.log(xs)))
    )
    return math.exp(log_q)
