"""
Special functions

Hermite polynomials, the Hermite-theta lattice sums

    Θ_k(u, v) = Σ_{n∈Z} H_k(un + v) e^{-(un + v)^2}

together with their Poisson-dual form, the error-function integrals Ψ(u)
and Ψ(u1, u2), and the Riemann zeta / xi values used by the height moments.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import bernoulli, erf, gammaln, poch

from src.config import DEFAULT_TOL
from src.errors import DomainError, NonPositivePeriod, ToleranceNotMet
from src.numerics.quad import Integrand1D, integrate_1d

logger = logging.getLogger(__name__)

# Extra decades of decay demanded beyond ln(1/tol)
TRUNCATION_MARGIN = 40.0

# Periods below this go through the Poisson-dual series
DUAL_CROSSOVER = math.sqrt(math.pi)

# Euler-Maclaurin: direct terms and Bernoulli corrections
_ZETA_TERMS = 64
_ZETA_CORRECTIONS = 8
_BERNOULLI = bernoulli(2 * _ZETA_CORRECTIONS)

LogTerm = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series together with a bound on the discarded remainder."""

    value: float
    tail_bound: float
    terms_used: int

    def to_dict(self) -> dict:
        return asdict(self)


# =============================================================================
# Hermite polynomials
# =============================================================================

def hermite(k: int, x: ArrayLike) -> float | NDArray[np.float64]:
    """
    Physicists' Hermite polynomial H_k(x) by the three-term recurrence

        H_{k+1}(x) = 2x H_k(x) - 2k H_{k-1}(x)

    Accepts scalars or arrays; scalars come back as float.
    """
    if k < 0:
        raise DomainError(f"Hermite degree must be non-negative, got {k}")
    xs = np.asarray(x, dtype=float)
    prev = np.ones_like(xs)
    if k == 0:
        out = prev
    else:
        cur = 2.0 * xs
        for j in range(1, k):
            prev, cur = cur, 2.0 * xs * cur - 2.0 * j * prev
        out = cur
    if out.ndim == 0:
        return float(out)
    return out


# =============================================================================
# Truncation rules
# =============================================================================

def _target(tol: float) -> float:
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    return TRUNCATION_MARGIN + math.log(1.0 / tol)


def _majorant_tail(log_term: LogTerm, start: int) -> float:
    """
    Bound Σ_{n >= start} exp(log_term(n)) for a log-concave, eventually
    decreasing majorant: 64 explicit terms plus a geometric remainder.
    """
    n = np.arange(start, start + 64, dtype=float)
    terms = np.exp(log_term(n))
    if terms[-2] <= 0.0:
        return float(terms.sum())
    ratio = terms[-1] / terms[-2]
    if ratio >= 1.0:
        return math.inf
    return float(terms.sum() + terms[-1] * ratio / (1.0 - ratio))


def theta_cutoff(k: int, u: float, v_abs: float, tol: float) -> int:
    """Smallest n_max with un - |v| >= 0 whose Gaussian decay clears the target."""
    target = _target(tol)
    n = max(1, math.ceil((v_abs + math.sqrt(target)) / u))
    while True:
        a = u * n - v_abs
        if a >= 0 and a * a - k * math.log(2.0 * (u * n + v_abs) + 2.0) >= target:
            return n
        n += 1


def _theta_tail(k: int, u: float, v_abs: float, n_max: int) -> float:
    # |H_k(x)| <= (2|x| + sqrt(k))^k; both signs of n contribute
    root_k = math.sqrt(k)

    def log_term(n: NDArray[np.float64]) -> NDArray[np.float64]:
        return k * np.log(2.0 * (u * n + v_abs) + root_k + 1e-300) - (u * n - v_abs) ** 2

    return 2.0 * _majorant_tail(log_term, n_max + 1)


def _dual_cutoff(k: int, eta: float, tol: float) -> int:
    target = _target(tol)
    m = max(1, math.ceil(eta * math.sqrt(target / math.pi)))
    while math.pi * m * m / (eta * eta) - k * math.log(m) < target:
        m += 1
    return m


def _dual_tail(k: int, eta: float, m_max: int) -> float:
    def log_term(m: NDArray[np.float64]) -> NDArray[np.float64]:
        return k * np.log(m) - math.pi * m * m / (eta * eta)

    return 2.0 * _majorant_tail(log_term, m_max + 1)


# =============================================================================
# Hermite-theta series
# =============================================================================

def _check_period(value: float, name: str) -> None:
    if not value > 0:
        raise NonPositivePeriod(f"{name} must be positive, got {value}")


def _direct_sum(
    k: int, u: float, v: NDArray[np.float64], tol: float
) -> tuple[NDArray[np.float64], float, int]:
    v_abs = float(np.max(np.abs(v))) if v.size else 0.0
    n_max = theta_cutoff(k, u, v_abs, tol)
    n = np.arange(-n_max, n_max + 1, dtype=float)
    x = u * n[None, :] + v[:, None]
    terms = hermite(k, x) * np.exp(-x * x)
    return terms.sum(axis=1), _theta_tail(k, u, v_abs, n_max), 2 * n_max + 1


def _dual_weights(
    k: int, eta: float, m_max: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    m = np.arange(-m_max, m_max + 1, dtype=float)
    return m, m**k * np.exp(-math.pi * m * m / (eta * eta))


def _dual_components(
    k: int, eta: float, xi: NDArray[np.float64], tol: float
) -> tuple[NDArray[np.float64], NDArray[np.float64], float, int]:
    """
    Cosine and sine parts of Σ_m m^k exp(-π m²/η² + 2πi ξ m/η²).
    The surviving part is the cosine one for even k and the sine one for odd k.
    """
    m_max = _dual_cutoff(k, eta, tol)
    m, weights = _dual_weights(k, eta, m_max)
    phase = 2.0 * math.pi * xi[:, None] * m[None, :] / (eta * eta)
    cos_part = (weights * np.cos(phase)).sum(axis=1)
    sin_part = (weights * np.sin(phase)).sum(axis=1)
    return cos_part, sin_part, _dual_tail(k, eta, m_max), 2 * m_max + 1


def theta(k: int, u: float, v: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Θ_k(u, v) by direct summation over n."""
    _check_period(u, "theta period u")
    if k < 0:
        raise DomainError(f"theta order must be non-negative, got {k}")
    values, tail, terms = _direct_sum(k, u, np.array([float(v)]), tol)
    return SeriesValue(float(values[0]), tail, terms)


def poisson_prefactor(k: int, eta: float) -> float:
    """(-1)^{⌊k/2⌋} η^{k+1} / (2^k π^{k/2}), linking the two sides of the Poisson identity."""
    sign = -1.0 if (k // 2) % 2 else 1.0
    log_abs = (k + 1) * math.log(eta) - k * math.log(2.0) - 0.5 * k * math.log(math.pi)
    return sign * math.exp(log_abs)


def poisson_lhs(k: int, eta: float, xi: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """
    Non-vanishing component of Σ_n n^k exp(-π n²/η² + 2πi ξ n/η²).

    Returns the real part for even k and the imaginary part for odd k. The
    other component cancels between n and -n and is checked against `tol`.
    """
    _check_period(eta, "Poisson period eta")
    if k < 0:
        raise DomainError(f"order must be non-negative, got {k}")
    cos_part, sin_part, tail, terms = _dual_components(k, eta, np.array([float(xi)]), tol)
    value, residual = (cos_part[0], sin_part[0]) if k % 2 == 0 else (sin_part[0], cos_part[0])
    _, weights = _dual_weights(k, eta, (terms - 1) // 2)
    scale = max(1.0, float(np.abs(weights).sum()))
    if abs(residual) > max(tol, 1e-13 * scale):
        raise ToleranceNotMet(
            f"poisson_lhs: cancelling component {residual:.3e} exceeds tolerance"
        )
    return SeriesValue(float(value), tail, terms)


def theta_dual(k: int, u: float, v: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Θ_k(u, v) through the Poisson-dual series, fast for small u."""
    _check_period(u, "theta period u")
    eta = u / math.sqrt(math.pi)
    prefactor = poisson_prefactor(k, eta)
    lhs = poisson_lhs(k, eta, u * v / math.pi, tol * abs(prefactor) if prefactor else tol)
    return SeriesValue(lhs.value / prefactor, lhs.tail_bound / abs(prefactor), lhs.terms_used)


def theta_values(
    k: int, u: float, v: ArrayLike, tol: float = DEFAULT_TOL
) -> tuple[NDArray[np.float64], float]:
    """
    Vectorized Θ_k(u, ·) over an array of v.

    Returns the values and a single tail bound valid for all of them. The
    series representation is picked by the period.
    """
    _check_period(u, "theta period u")
    vs = np.asarray(v, dtype=float)
    flat = vs.reshape(-1)
    if u >= DUAL_CROSSOVER:
        values, tail, terms = _direct_sum(k, u, flat, tol)
    else:
        eta = u / math.sqrt(math.pi)
        prefactor = poisson_prefactor(k, eta)
        cos_part, sin_part, lhs_tail, terms = _dual_components(
            k, eta, u * flat / math.pi, tol * abs(prefactor)
        )
        lhs = cos_part if k % 2 == 0 else sin_part
        values, tail = lhs / prefactor, lhs_tail / abs(prefactor)
    logger.debug(
        "theta_values k=%d u=%.4g: %s, %d terms",
        k, u, "direct" if u >= DUAL_CROSSOVER else "dual", terms,
    )
    return values.reshape(vs.shape), tail


def theta_series(k: int, u: float, v: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Θ_k(u, v) by whichever of the direct and dual series converges faster."""
    if u >= DUAL_CROSSOVER:
        return theta(k, u, v, tol)
    return theta_dual(k, u, v, tol)


# =============================================================================
# Error-function integrals
# =============================================================================

def psi(u: ArrayLike) -> float | NDArray[np.float64]:
    """Ψ(u) = 2/√π ∫_0^u e^{-v²} dv, i.e. erf(u)."""
    out = erf(np.asarray(u, dtype=float))
    if np.ndim(out) == 0:
        return float(out)
    return np.asarray(out)


def _signed_integral(f: Integrand1D, a: float, b: float, tol: float) -> float:
    if a <= b:
        return integrate_1d(f, a, b, tol).value
    return -integrate_1d(f, b, a, tol).value


def _rectangle(
    outer: tuple[float, float], inner: tuple[float, float], tol: float
) -> float:
    """∫_{outer} dv1 ∫_{inner} dv2 exp(-v1² - (v1 - v2)²) with signed limits."""
    lo, hi = inner
    if outer[0] == outer[1] or lo == hi:
        return 0.0
    inner_tol = tol / max(1.0, 4.0 * abs(outer[1] - outer[0]))

    def integrand(v1: NDArray[np.float64]) -> NDArray[np.float64]:
        out = np.empty_like(v1)
        for idx, x in np.ndenumerate(v1):
            inner_value = _signed_integral(
                lambda v2, x=x: np.exp(-((x - v2) ** 2)), lo, hi, inner_tol
            )
            out[idx] = math.exp(-x * x) * inner_value
        return out

    return _signed_integral(integrand, outer[0], outer[1], tol)


def psi2(u1: float, u2: float, tol: float = DEFAULT_TOL) -> float:
    """
    Ψ(u1, u2) = 2/π [ ∫_0^{u1} dv1 ∫_{u1-u2}^{u2-u1} dv2
                      - ∫_{u1}^{u2} dv1 ∫_{u2-u1}^{u1+u2} dv2 ] e^{-v1² - (v1-v2)²}
    """
    first = _rectangle((0.0, u1), (u1 - u2, u2 - u1), tol)
    second = _rectangle((u1, u2), (u2 - u1, u1 + u2), tol)
    return 2.0 / math.pi * (first - second)


# =============================================================================
# Riemann zeta and xi
# =============================================================================

def riemann_zeta(m: float) -> float:
    """ζ(m) for real m > 1 by direct summation with an Euler-Maclaurin tail."""
    if not m > 1:
        raise DomainError(f"zeta series needs m > 1, got {m}")
    n = _ZETA_TERMS
    head = math.fsum(float(j) ** -m for j in range(1, n))
    tail = n ** (1.0 - m) / (m - 1.0) + 0.5 * n**-m
    for j in range(1, _ZETA_CORRECTIONS + 1):
        b2j = float(_BERNOULLI[2 * j])
        tail += b2j / math.factorial(2 * j) * float(poch(m, 2 * j - 1)) * n ** (-m - 2 * j + 1)
    return head + tail


def riemann_xi(m: float) -> float:
    """ξ(m) = ½ m(m-1) π^{-m/2} Γ(m/2) ζ(m) for real m > 1."""
    if not m > 1:
        raise DomainError(f"riemann_xi needs m > 1, got {m}")
    log_part = -0.5 * m * math.log(math.pi) + float(gammaln(0.5 * m))
    return 0.5 * m * (m - 1.0) * math.exp(log_part) * riemann_zeta(m)
