"""
Transition kernels and Karlin-McGregor determinants

Free, half-line-absorbing and interval-absorbing heat kernels for
Brownian motion with generator ½ d²/dx², the determinants built from them,
and the survival probabilities of N independent particles in the Weyl
chambers

    W^A_N = {x_1 < ... < x_N},   W^C_N = {0 < x_1 < ... < x_N}

as pfaffians.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src import config
from src.config import DEFAULT_TOL
from src.errors import (
    AssemblyError,
    ChamberMismatch,
    DomainError,
    NonPositiveTime,
    OutOfInterval,
)
from src.numerics.matalg import (
    AntisymmetricMatrix,
    log_determinant,
    log_pfaffian,
    pad_skew,
    pfaffian_sensitivity,
)
from src.numerics.quad import integrate_1d, integrate_ordered_2d
from src.numerics.specfun import psi, psi2

logger = logging.getLogger(__name__)

# Karlin-McGregor and survival positivity slack in debug mode
POSITIVITY_SLACK = -1e-13

# Extra decades of decay beyond ln(1/tol) for the kernel series
_SERIES_MARGIN = 40.0
# Relative accuracy demanded of each de Bruijn entry on top of the absolute tol
DE_BRUIJN_RTOL = 1e-13


class Chamber(str, Enum):
    TYPE_A = "A"
    TYPE_C = "C"


class Kernel(str, Enum):
    """Which one-particle kernel fills a Karlin-McGregor matrix."""

    FREE = "free"
    HALFLINE = "halfline"
    INTERVAL = "interval"


# =============================================================================
# Configurations and geometry
# =============================================================================

@dataclass(frozen=True)
class OrderedConfiguration:
    """A point of W^A_N or W^C_N."""

    chamber: Chamber
    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) == 0:
            raise DomainError("a configuration needs at least one particle")
        if not all(math.isfinite(c) for c in self.coords):
            raise DomainError("configuration coordinates must be finite")
        if any(b <= a for a, b in zip(self.coords, self.coords[1:], strict=False)):
            raise DomainError(f"coordinates must be strictly increasing: {self.coords}")
        if self.chamber is Chamber.TYPE_C and self.coords[0] <= 0:
            raise DomainError(f"type C coordinates must be positive: {self.coords}")

    @classmethod
    def of(cls, chamber: Chamber, coords: ArrayLike) -> "OrderedConfiguration":
        return cls(chamber, tuple(float(c) for c in np.asarray(coords, dtype=float).ravel()))

    @property
    def N(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> NDArray[np.float64]:
        return np.array(self.coords, dtype=float)

    def scaled(self, factor: float) -> "OrderedConfiguration":
        return OrderedConfiguration.of(self.chamber, self.array * factor)


@dataclass(frozen=True)
class IntervalGeometry:
    """Absorbing walls at `left` and `right` over a time window of length `duration`."""

    left: float
    right: float
    duration: float

    def __post_init__(self) -> None:
        if not self.left < self.right:
            raise DomainError(f"interval needs left < right, got ({self.left}, {self.right})")
        if not self.duration > 0:
            raise NonPositiveTime(f"duration must be positive, got {self.duration}")

    @property
    def width(self) -> float:
        return self.right - self.left

    def require_inside(self, points: ArrayLike) -> None:
        values = np.asarray(points, dtype=float)
        if np.any(values <= self.left) or np.any(values >= self.right):
            raise OutOfInterval(
                f"points must lie strictly inside ({self.left}, {self.right})"
            )

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right, "duration": self.duration}


# =============================================================================
# One-particle kernels
# =============================================================================

def _as_output(values: NDArray[np.float64]) -> float | NDArray[np.float64]:
    if values.ndim == 0:
        return float(values)
    return values


def _check_time(t: float) -> None:
    if not t > 0:
        raise NonPositiveTime(f"kernel time must be positive, got {t}")


def heat_kernel(t: float, y: ArrayLike, x: ArrayLike) -> float | NDArray[np.float64]:
    """p(t, y|x) = exp(-(x - y)²/2t) / √(2πt)."""
    _check_time(t)
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return _as_output(np.exp(-d * d / (2.0 * t)) / math.sqrt(2.0 * math.pi * t))


def absorbing_halfline(t: float, y: ArrayLike, x: ArrayLike) -> float | NDArray[np.float64]:
    """p(t, y|x) - p(t, y|-x): Brownian motion killed at 0."""
    _check_time(t)
    ys = np.asarray(y, dtype=float)
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("half-line kernel needs x > 0 and y > 0")
    # p(y|x) - p(y|-x) = p(y|x) (1 - e^{-2xy/t})
    near = np.exp(-((ys - xs) ** 2) / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)
    return _as_output(near * -np.expm1(-2.0 * xs * ys / t))


def _kernel_target(tol: float) -> float:
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    return _SERIES_MARGIN + math.log(1.0 / tol)


def absorbing_interval_spectral(
    t: float, y: ArrayLike, x: ArrayLike, geometry: IntervalGeometry, tol: float = DEFAULT_TOL
) -> float | NDArray[np.float64]:
    """Sine series (2/L) Σ_n exp(-π²tn²/2L²) sin(nπx̃/L) sin(nπỹ/L)."""
    _check_time(t)
    width = geometry.width
    xs = np.asarray(x, dtype=float) - geometry.left
    ys = np.asarray(y, dtype=float) - geometry.left
    rate = math.pi**2 * t / (2.0 * width**2)
    n_max = max(1, math.ceil(math.sqrt(_kernel_target(tol) / rate)))
    n = np.arange(1, n_max + 1, dtype=float)
    shape = np.broadcast_shapes(xs.shape, ys.shape)
    xs = np.broadcast_to(xs, shape)[..., None]
    ys = np.broadcast_to(ys, shape)[..., None]
    terms = np.exp(-rate * n * n) * np.sin(n * math.pi * xs / width) * np.sin(
        n * math.pi * ys / width
    )
    return _as_output(2.0 / width * terms.sum(axis=-1))


def absorbing_interval_images(
    t: float, y: ArrayLike, x: ArrayLike, geometry: IntervalGeometry, tol: float = DEFAULT_TOL
) -> float | NDArray[np.float64]:
    """Image series Σ_k [p(t, ỹ|x̃ - 2kL) - p(t, ỹ|-x̃ - 2kL)]."""
    _check_time(t)
    width = geometry.width
    xs = np.asarray(x, dtype=float) - geometry.left
    ys = np.asarray(y, dtype=float) - geometry.left
    reach = math.sqrt(2.0 * t * _kernel_target(tol))
    k_max = math.ceil(reach / (2.0 * width)) + 1
    k = np.arange(-k_max, k_max + 1, dtype=float)
    shape = np.broadcast_shapes(xs.shape, ys.shape)
    xs = np.broadcast_to(xs, shape)[..., None]
    ys = np.broadcast_to(ys, shape)[..., None]
    shift = 2.0 * k * width
    norm = 1.0 / math.sqrt(2.0 * math.pi * t)
    direct = np.exp(-((ys - xs + shift) ** 2) / (2.0 * t))
    mirror = np.exp(-((ys + xs + shift) ** 2) / (2.0 * t))
    return _as_output(norm * (direct - mirror).sum(axis=-1))


def absorbing_interval(
    t: float, y: ArrayLike, x: ArrayLike, geometry: IntervalGeometry, tol: float = DEFAULT_TOL
) -> float | NDArray[np.float64]:
    """
    Transition density of Brownian motion killed on leaving (left, right).

    The sine series is used for t >= L²/π² and the image series below.
    """
    _check_time(t)
    geometry.require_inside(x)
    geometry.require_inside(y)
    crossover = geometry.width**2 / math.pi**2
    if t >= crossover:
        return absorbing_interval_spectral(t, y, x, geometry, tol)
    return absorbing_interval_images(t, y, x, geometry, tol)


# =============================================================================
# Karlin-McGregor determinants
# =============================================================================

def km_matrix(
    t: float,
    to: OrderedConfiguration,
    from_: OrderedConfiguration,
    kernel: Kernel,
    geometry: IntervalGeometry | None,
    tol: float,
) -> NDArray[np.float64]:
    """Matrix [p(t, to_i | from_j)] of one-particle kernels."""
    if to.chamber is not from_.chamber or to.N != from_.N:
        raise ChamberMismatch(
            f"configurations differ: {to.chamber.value}{to.N} vs {from_.chamber.value}{from_.N}"
        )
    y = to.array[:, None]
    x = from_.array[None, :]
    if kernel is Kernel.FREE:
        values = heat_kernel(t, y, x)
    elif kernel is Kernel.HALFLINE:
        if to.chamber is not Chamber.TYPE_C:
            raise ChamberMismatch("the half-line kernel pairs with type C configurations")
        values = absorbing_halfline(t, y, x)
    else:
        if geometry is None:
            raise DomainError("the interval kernel needs a geometry")
        values = absorbing_interval(t, y, x, geometry, tol)
    return np.asarray(values, dtype=float)


def log_km_determinant(
    t: float,
    to: OrderedConfiguration,
    from_: OrderedConfiguration,
    kernel: Kernel = Kernel.FREE,
    geometry: IntervalGeometry | None = None,
    tol: float = DEFAULT_TOL,
) -> tuple[float, float]:
    """(sign, log|det[p(t, to_i | from_j)]|)."""
    return log_determinant(km_matrix(t, to, from_, kernel, geometry, tol))


def km_determinant(
    t: float,
    to: OrderedConfiguration,
    from_: OrderedConfiguration,
    kernel: Kernel = Kernel.FREE,
    geometry: IntervalGeometry | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """
    Karlin-McGregor determinant det[p(t, to_i | from_j)].

    Nonnegative for configurations of one chamber; checked in debug mode.
    """
    sign, log_abs = log_km_determinant(t, to, from_, kernel, geometry, tol)
    value = 0.0 if sign == 0.0 else sign * math.exp(log_abs)
    if config.DEBUG:
        scale = math.exp(log_abs) if sign != 0.0 else 0.0
        if value < POSITIVITY_SLACK * max(1.0, scale):
            raise AssemblyError(f"negative Karlin-McGregor determinant {value:.3e}")
    return value


# =============================================================================
# Survival probabilities
# =============================================================================

def _check_survival(value: float, what: str) -> None:
    if config.DEBUG and not (POSITIVITY_SLACK <= value <= 1.0 - POSITIVITY_SLACK):
        raise AssemblyError(f"{what} survival probability {value:.3e} outside [0, 1]")


def _signed_pfaffian(matrix: AntisymmetricMatrix) -> float:
    sign, log_abs = log_pfaffian(matrix)
    return 0.0 if sign == 0.0 else sign * math.exp(log_abs)


def survival_A(s: float, x: OrderedConfiguration) -> float:
    """
    Probability that N independent Brownian motions started at x stay
    ordered up to time s.

    Pfaffian with entries erf((y_j - y_i)/√2), y = x/√(2s), bordered by 1
    for odd N.
    """
    _check_time(s)
    y = x.array / math.sqrt(2.0 * s)
    core = np.asarray(psi((y[None, :] - y[:, None]) / math.sqrt(2.0)), dtype=float)
    value = _signed_pfaffian(pad_skew(core, np.ones(x.N)))
    _check_survival(value, "type A")
    return value


def survival_C(s: float, x: OrderedConfiguration, tol: float = DEFAULT_TOL) -> float:
    """
    Probability that N independent Brownian motions started at x stay
    ordered and positive up to time s.

    Pfaffian with core Ψ(y_i, y_j) and border Ψ(y_i), y = x/√(2s).
    """
    _check_time(s)
    if x.chamber is not Chamber.TYPE_C:
        raise ChamberMismatch("survival_C needs a type C configuration")
    y = x.array / math.sqrt(2.0 * s)
    n = x.N
    core = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            core[i, j] = psi2(float(y[i]), float(y[j]), tol)
            core[j, i] = -core[i, j]
    value = _signed_pfaffian(pad_skew(core, np.asarray(psi(y), dtype=float)))
    _check_survival(value, "type C")
    return value


# =============================================================================
# de Bruijn pfaffian
# =============================================================================

Function1D = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class DeBruijnResult:
    """Pfaffian of the de Bruijn matrix with its propagated quadrature error."""

    sign: float
    log_abs: float
    error_estimate: float
    evaluations: int

    @property
    def value(self) -> float:
        return 0.0 if self.sign == 0.0 else self.sign * math.exp(self.log_abs)


def de_bruijn_pfaffian(
    functions: Sequence[Function1D],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    *,
    rtol: float = DE_BRUIJN_RTOL,
) -> DeBruijnResult:
    """
    ∫_{a<x_1<...<x_N<b} det[φ_i(x_j)] dx as a pfaffian.

    Core entries are I_ij = ∫∫_{a<x1<x2<b} [φ_i(x1)φ_j(x2) - φ_j(x1)φ_i(x2)];
    for odd N the border is I_i = ∫_a^b φ_i. Each entry is integrated to
    max(tol, rtol·|entry|) and the entry errors reach the result through
    pfaffian_sensitivity.
    """
    n = len(functions)
    singles = [integrate_1d(f, a, b, tol, rtol=rtol) for f in functions]
    core = np.zeros((n, n))
    errors = np.zeros((n + 1, n + 1))
    evaluations = sum(q.evaluations for q in singles)

    for i in range(n):
        for j in range(i + 1, n):
            fi, fj = functions[i], functions[j]

            def pair(
                x1: NDArray[np.float64],
                x2: NDArray[np.float64],
                fi: Function1D = fi,
                fj: Function1D = fj,
            ) -> NDArray[np.float64]:
                return fi(x1) * fj(x2) - fj(x1) * fi(x2)

            result = integrate_ordered_2d(pair, a, b, tol, rtol=rtol)
            core[i, j], core[j, i] = result.value, -result.value
            errors[i, j] = errors[j, i] = result.error_estimate
            evaluations += result.evaluations

    border = np.array([q.value for q in singles])
    matrix = pad_skew(core, border)
    if n % 2:
        errors[:n, n] = errors[n, :n] = [q.error_estimate for q in singles]
    else:
        errors = errors[:n, :n]
    sign, log_abs = log_pfaffian(matrix)
    error = pfaffian_sensitivity(matrix, errors)
    logger.debug("de Bruijn pfaffian N=%d on [%g, %g]: %d evaluations", n, a, b, evaluations)
    return DeBruijnResult(sign, log_abs, error, evaluations)
