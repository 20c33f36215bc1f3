"""
Extreme-value distribution functions

Exact laws of the extremes of N noncolliding particles over [0, T]:

- BridgeAA:  joint law of (L, R) for the noncolliding Brownian bridge
- MotionAR:  joint law of (L, R) for noncolliding Brownian motion
- BesselCC:  maximum height H of nonintersecting Bessel bridges
- MeanderCR: maximum height H of the noncolliding Brownian meander

Each is a determinant or pfaffian of Hermite-theta values. For particles
started and ended at given configurations the laws are ratios of
Karlin-McGregor determinants (cdf_general).
"""

import logging
import math
import threading
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import partial

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln

from src.config import DEFAULT_TOL, MAX_CHAMBER_N, MAX_CLOSED_FORM_N
from src.diffusions.kernels import (
    Chamber,
    DeBruijnResult,
    IntervalGeometry,
    Kernel,
    OrderedConfiguration,
    absorbing_interval,
    de_bruijn_pfaffian,
    km_matrix,
    log_km_determinant,
    survival_A,
    survival_C,
)
from src.errors import (
    AssemblyError,
    ChamberMismatch,
    DimensionTooLarge,
    DomainError,
    NonPositiveTime,
)
from src.numerics.matalg import determinant_sensitivity, log_determinant
from src.numerics.specfun import SeriesValue, theta_series, theta_values
from src.utils.concurrency import run_in_threads

logger = logging.getLogger(__name__)

# Raw values within this slack of [0, 1] are clamped silently
CLAMP_SLACK = 1e-9
# Raw values beyond this slack indicate an assembly defect
ASSEMBLY_SLACK = 1e-6


# =============================================================================
# Types
# =============================================================================

class ProcessTag(str, Enum):
    BRIDGE_AA = "BridgeAA"
    MOTION_AR = "MotionAR"
    BESSEL_CC = "BesselCC"
    MEANDER_CR = "MeanderCR"
    GENERAL_AB_A = "GeneralAB-A"
    GENERAL_AR_A = "GeneralAR-A"
    GENERAL_AB_C = "GeneralAB-C"
    GENERAL_AR_C = "GeneralAR-C"

    @property
    def chamber(self) -> Chamber:
        if self in (ProcessTag.BESSEL_CC, ProcessTag.MEANDER_CR) or self.value.endswith("-C"):
            return Chamber.TYPE_C
        return Chamber.TYPE_A

    @property
    def is_general(self) -> bool:
        return self.value.startswith("General")

    @property
    def free_end(self) -> bool:
        return self in (
            ProcessTag.MOTION_AR,
            ProcessTag.MEANDER_CR,
            ProcessTag.GENERAL_AR_A,
            ProcessTag.GENERAL_AR_C,
        )


@dataclass(frozen=True)
class ProcessKind:
    """
    Which process an extreme-value law refers to.

    General tags carry the start configuration and, for fixed-end (AB)
    tags, the end configuration; limit tags carry neither.
    """

    tag: ProcessTag
    start: OrderedConfiguration | None = None
    end: OrderedConfiguration | None = None

    def __post_init__(self) -> None:
        if not self.tag.is_general:
            if self.start is not None or self.end is not None:
                raise DomainError(f"{self.tag.value} starts and ends at the origin")
            return
        if self.start is None:
            raise DomainError(f"{self.tag.value} needs a start configuration")
        if self.tag.free_end and self.end is not None:
            raise DomainError(f"{self.tag.value} has a free right endpoint")
        if not self.tag.free_end and self.end is None:
            raise DomainError(f"{self.tag.value} needs an end configuration")
        for config in (self.start, self.end):
            if config is not None and config.chamber is not self.tag.chamber:
                raise ChamberMismatch(
                    f"{self.tag.value} needs type {self.tag.chamber.value} configurations"
                )
        if self.end is not None and self.end.N != self.start.N:
            raise ChamberMismatch("start and end configurations differ in N")


@dataclass(frozen=True)
class CdfEvaluation:
    """A probability with its error estimate and the parameters it was computed at."""

    value: float
    raw: float
    error_estimate: float
    N: int
    T: float
    geometry: IntervalGeometry

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "raw": self.raw,
            "error_estimate": self.error_estimate,
            "N": self.N,
            "T": self.T,
            "geometry": self.geometry.to_dict(),
        }


def finalize(
    raw: float, error: float, N: int, T: float, geometry: IntervalGeometry
) -> CdfEvaluation:
    """Clamp a raw probability into [0, 1], rejecting values far outside."""
    if not math.isfinite(raw) or not -ASSEMBLY_SLACK <= raw <= 1.0 + ASSEMBLY_SLACK:
        raise AssemblyError(f"assembled probability {raw!r} outside [0, 1] (N={N}, T={T})")
    value = min(1.0, max(0.0, raw))
    excess = abs(raw - value)
    if excess > CLAMP_SLACK:
        logger.warning("clamped raw probability %.3e (N=%d, T=%g)", raw, N, T)
    error = max(error, excess)
    return CdfEvaluation(value, raw, error, N, T, geometry)


# =============================================================================
# Argument checks and prefactors
# =============================================================================

def _check_common(N: int, T: float, lengths: dict[str, float]) -> None:
    if N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if N > MAX_CLOSED_FORM_N:
        raise DimensionTooLarge(f"N={N} exceeds the supported range N <= {MAX_CLOSED_FORM_N}")
    if not T > 0:
        raise NonPositiveTime(f"T must be positive, got {T}")
    for name, value in lengths.items():
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value}")


def _log_gamma_sum(args: NDArray[np.float64]) -> float:
    return float(np.sum(gammaln(args)))


def _assemble(sign: float, log_abs: float, log_prefactor: float) -> float:
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs + log_prefactor)


def _theta_row(orders: range, u: float, v: float, tol: float) -> list[SeriesValue]:
    return [theta_series(k, u, v, tol) for k in orders]


# =============================================================================
# Noncolliding Brownian bridge: joint law of (L, R)
# =============================================================================

def cdf_bridge_joint_LR(
    N: int, T: float, ell: float, r: float, tol: float = DEFAULT_TOL
) -> CdfEvaluation:
    """
    P(-ℓ < L, R < r) for N noncolliding Brownian bridges from 0 to 0 on [0, T]:

        (-1)^N / (2^{N(N-1)/2} Π_{k=1}^N Γ(k))
            × det[Θ_{i+j-2}(u, 2ℓ/√(2T)) + (-1)^j Θ_{i+j-2}(u, 0)]

    with u = 2(ℓ + r)/√(2T) and i, j = 1..N.
    """
    _check_common(N, T, {"ell": ell, "r": r})
    verify_prefactor_signs()
    scale = math.sqrt(2.0 * T)
    u = 2.0 * (ell + r) / scale
    shifted = _theta_row(range(2 * N - 1), u, 2.0 * ell / scale, tol)
    centred = _theta_row(range(2 * N - 1), u, 0.0, tol)

    matrix = np.empty((N, N))
    errors = np.empty((N, N))
    for i in range(N):
        for j in range(N):
            k = i + j
            sign = -1.0 if (j + 1) % 2 else 1.0
            matrix[i, j] = shifted[k].value + sign * centred[k].value
            errors[i, j] = shifted[k].tail_bound + centred[k].tail_bound

    log_prefactor = -0.5 * N * (N - 1) * math.log(2.0) - _log_gamma_sum(
        np.arange(1, N + 1, dtype=float)
    )
    det_sign, det_log = log_determinant(matrix)
    sign = det_sign * (-1.0) ** N
    raw = _assemble(sign, det_log, log_prefactor)
    error = math.exp(log_prefactor) * determinant_sensitivity(matrix, errors)
    logger.debug("bridge N=%d u=%.4g raw=%.17g", N, u, raw)
    return finalize(raw, error, N, T, IntervalGeometry(-ell, r, T))


# =============================================================================
# Noncolliding Brownian motion: joint law of (L, R)
# =============================================================================

def _motion_functions(
    N: int, u: float, shift: float, tol: float
) -> list[Callable[[NDArray[np.float64]], NDArray[np.float64]]]:
    """z_i(x) = Θ_{i-1}(u, shift + x) + (-1)^i Θ_{i-1}(u, x), i = 1..N."""
    functions = []
    for i in range(1, N + 1):

        def z(
            x: NDArray[np.float64], k: int = i - 1, sign: float = (-1.0) ** i
        ) -> NDArray[np.float64]:
            upper, _ = theta_values(k, u, shift + x, tol)
            lower, _ = theta_values(k, u, x, tol)
            return upper + sign * lower

        functions.append(z)
    return functions


def cdf_motion_joint_LR(
    N: int, T: float, ell: float, r: float, tol: float = DEFAULT_TOL
) -> CdfEvaluation:
    """
    P(-ℓ < L, R < r) for N noncolliding Brownian motions started at 0:

        (-1)^{N(N+1)/2} / (2^{N(N-1)/4} Π_{k=1}^N Γ(k/2)) × Pf G

    where G is the de Bruijn matrix of z_1..z_N on (-ℓ/√(2T), r/√(2T)).
    """
    _check_common(N, T, {"ell": ell, "r": r})
    verify_prefactor_signs()
    scale = math.sqrt(2.0 * T)
    u = 2.0 * (ell + r) / scale
    functions = _motion_functions(N, u, 2.0 * ell / scale, tol)
    result = de_bruijn_pfaffian(functions, -ell / scale, r / scale, tol)

    log_prefactor = -0.25 * N * (N - 1) * math.log(2.0) - _log_gamma_sum(
        np.arange(1, N + 1, dtype=float) / 2.0
    )
    sign = result.sign * (-1.0) ** (N * (N + 1) // 2)
    raw = _assemble(sign, result.log_abs, log_prefactor)
    error = math.exp(log_prefactor) * result.error_estimate
    logger.debug("motion N=%d u=%.4g raw=%.17g", N, u, raw)
    return finalize(raw, error, N, T, IntervalGeometry(-ell, r, T))


# =============================================================================
# Nonintersecting Bessel bridges: maximum height
# =============================================================================

def cdf_bessel_H(
    N: int, T: float, h: float, tol: float = DEFAULT_TOL
) -> CdfEvaluation:
    """
    P(H < h) for N nonintersecting Bessel bridges (type C) on [0, T]:

        (-1)^N / (2^{N²} Π_{k=1}^N Γ(2k)) × det[Θ_{2(i+j-1)}(2h/√(2T), 0)]
    """
    _check_common(N, T, {"h": h})
    verify_prefactor_signs()
    u = 2.0 * h / math.sqrt(2.0 * T)
    values = _theta_row(range(2, 4 * N, 2), u, 0.0, tol)

    matrix = np.empty((N, N))
    errors = np.empty((N, N))
    for i in range(N):
        for j in range(N):
            matrix[i, j] = values[i + j].value
            errors[i, j] = values[i + j].tail_bound

    log_prefactor = -N * N * math.log(2.0) - _log_gamma_sum(
        2.0 * np.arange(1, N + 1, dtype=float)
    )
    det_sign, det_log = log_determinant(matrix)
    raw = _assemble(det_sign * (-1.0) ** N, det_log, log_prefactor)
    error = math.exp(log_prefactor) * determinant_sensitivity(matrix, errors)
    logger.debug("bessel N=%d u=%.4g raw=%.17g", N, u, raw)
    return finalize(raw, error, N, T, IntervalGeometry(0.0, h, T))


# =============================================================================
# Noncolliding Brownian meander: maximum height
# =============================================================================

def cdf_meander_H(
    N: int, T: float, h: float, tol: float = DEFAULT_TOL
) -> CdfEvaluation:
    """
    P(H < h) for the N-particle noncolliding Brownian meander on [0, T]:

        1 / (2^{N(N-1)/2} Π_{k=1}^N Γ(k)) × Pf G

    where G is the de Bruijn matrix of z_i(x) = Θ_{2i-1}(2h/√(2T), x)
    on (0, h/√(2T)).
    """
    _check_common(N, T, {"h": h})
    verify_prefactor_signs()
    scale = math.sqrt(2.0 * T)
    u = 2.0 * h / scale
    functions = []
    for i in range(1, N + 1):

        def z(x: NDArray[np.float64], k: int = 2 * i - 1) -> NDArray[np.float64]:
            return theta_values(k, u, x, tol)[0]

        functions.append(z)
    result = de_bruijn_pfaffian(functions, 0.0, h / scale, tol)

    log_prefactor = -0.5 * N * (N - 1) * math.log(2.0) - _log_gamma_sum(
        np.arange(1, N + 1, dtype=float)
    )
    raw = _assemble(result.sign, result.log_abs, log_prefactor)
    error = math.exp(log_prefactor) * result.error_estimate
    logger.debug("meander N=%d u=%.4g raw=%.17g", N, u, raw)
    return finalize(raw, error, N, T, IntervalGeometry(0.0, h, T))


# =============================================================================
# Prefactor sign check
# =============================================================================

# Each law at a reference point for an even and an odd N; all must come out positive
SIGN_REFERENCES: list[tuple[str, Callable[[], CdfEvaluation]]] = [
    (f"{name} N={n}", partial(law, n, 1.0, *lengths))
    for n in (2, 3)
    for name, law, lengths in (
        ("bridge", cdf_bridge_joint_LR, (1.5, 1.5)),
        ("motion", cdf_motion_joint_LR, (1.5, 2.0)),
        ("bessel", cdf_bessel_H, (2.5,)),
        ("meander", cdf_meander_H, (3.0,)),
    )
]

_signs_verified = False
_signs_lock = threading.Lock()
_signs_state = threading.local()


def verify_prefactor_signs() -> None:
    """
    Check once per process that the closed-form laws assemble to positive values.

    Runs on the first call of any closed-form law; the calls it makes itself
    skip the check. A failure leaves the check pending for the next call.

    Raises:
        AssemblyError: if a reference value is not positive.
    """
    global _signs_verified
    if _signs_verified or getattr(_signs_state, "running", False):
        return
    with _signs_lock:
        if _signs_verified:
            return
        _signs_state.running = True
        try:
            for name, reference in SIGN_REFERENCES:
                raw = reference().raw
                if not raw > 0.0:
                    raise AssemblyError(f"{name}: reference value {raw:.3e} is not positive")
            _signs_verified = True
            logger.debug("prefactor signs verified at %d reference points", len(SIGN_REFERENCES))
        finally:
            _signs_state.running = False


# =============================================================================
# Arbitrary endpoints: ratios of Karlin-McGregor determinants
# =============================================================================

def _interval_density(
    T: float, geometry: IntervalGeometry, start: float, tol: float
) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    def density(b: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.asarray(absorbing_interval(T, b, start, geometry, tol), dtype=float)

    return density


def cdf_general(
    kind: ProcessKind,
    geometry: IntervalGeometry,
    N: int,
    T: float,
    tol: float = DEFAULT_TOL,
) -> CdfEvaluation:
    """
    Extreme-value law for particles started at `kind.start`.

    Fixed ends: f^{restricted}(T, b|a) / f(T, b|a), with the interval
    kernel on the geometry and the free (type A) or half-line (type C)
    kernel below. Free ends: the restricted determinant integrated over the
    chamber inside the interval, divided by the survival probability.
    Limit tags dispatch to the closed-form laws.
    """
    if not math.isclose(geometry.duration, T):
        raise DomainError(f"geometry duration {geometry.duration} differs from T={T}")
    tag = kind.tag
    if tag is ProcessTag.BRIDGE_AA:
        return cdf_bridge_joint_LR(N, T, -geometry.left, geometry.right, tol)
    if tag is ProcessTag.MOTION_AR:
        return cdf_motion_joint_LR(N, T, -geometry.left, geometry.right, tol)
    if tag.chamber is Chamber.TYPE_C and geometry.left != 0.0:
        raise DomainError("type C laws take the interval (0, h)")
    if tag is ProcessTag.BESSEL_CC:
        return cdf_bessel_H(N, T, geometry.right, tol)
    if tag is ProcessTag.MEANDER_CR:
        return cdf_meander_H(N, T, geometry.right, tol)

    assert kind.start is not None
    start = kind.start
    if start.N != N:
        raise ChamberMismatch(f"start configuration has {start.N} particles, N={N}")
    _check_common(N, T, {})
    geometry.require_inside(start.array)

    if not tag.free_end:
        assert kind.end is not None
        geometry.require_inside(kind.end.array)
        below = Kernel.FREE if tag.chamber is Chamber.TYPE_A else Kernel.HALFLINE
        top = km_matrix(T, kind.end, start, Kernel.INTERVAL, geometry, tol)
        top_sign, top_log = log_determinant(top)
        bottom_sign, bottom_log = log_km_determinant(T, kind.end, start, below)
        if bottom_sign <= 0.0:
            raise AssemblyError("free Karlin-McGregor determinant is not positive")
        raw = _assemble(top_sign, top_log - bottom_log, 0.0)
        # interval-kernel entries carry a series truncation error of at most tol
        error = determinant_sensitivity(top, tol) * math.exp(-bottom_log)
        return finalize(raw, error, N, T, geometry)

    if N > MAX_CHAMBER_N:
        raise DimensionTooLarge(
            f"chamber-integral ratios support N <= {MAX_CHAMBER_N}, got N={N}"
        )
    densities = [_interval_density(T, geometry, a, tol) for a in start.coords]
    numerator: DeBruijnResult = de_bruijn_pfaffian(densities, geometry.left, geometry.right, tol)
    if tag.chamber is Chamber.TYPE_A:
        survival = survival_A(T, start)
    else:
        survival = survival_C(T, start, tol)
    if survival <= 0.0:
        raise AssemblyError(f"survival probability {survival:.3e} is not positive")
    raw = numerator.value / survival
    return finalize(raw, numerator.error_estimate / survival, N, T, geometry)


# =============================================================================
# Single-particle closed forms
# =============================================================================

def _lattice_sum(
    term: Callable[[NDArray[np.float64]], NDArray[np.float64]], decay: float, tol: float
) -> SeriesValue:
    """Σ_{n∈Z} term(n) for terms bounded by (1 + c n²) e^{-decay·n²}."""
    target = 40.0 + math.log(1.0 / tol)
    n_max = max(2, math.ceil(math.sqrt((target + 10.0) / decay)) + 1)
    n = np.arange(-n_max, n_max + 1, dtype=float)
    values = term(n)
    edge = np.array([-(n_max + 1.0), n_max + 1.0])
    tail = 2.0 * float(np.abs(term(edge)).sum())
    return SeriesValue(float(math.fsum(values)), tail, 2 * n_max + 1)


def bessel_height_n1_series(T: float, h: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """P(H < h) for one Bessel bridge: Σ_n (1 - 4h²n²/T) e^{-2h²n²/T}."""
    _check_common(1, T, {"h": h})
    c = 2.0 * h * h / T
    return _lattice_sum(lambda n: (1.0 - 2.0 * c * n * n) * np.exp(-c * n * n), c, tol)


def meander_height_n1_series(T: float, h: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """P(H < h) for one Brownian meander: Σ_m (-1)^m e^{-m²h²/2T}."""
    _check_common(1, T, {"h": h})
    c = h * h / (2.0 * T)
    return _lattice_sum(lambda m: np.where(m % 2 == 0, 1.0, -1.0) * np.exp(-c * m * m), c, tol)


def bridge_range_n1_series(
    T: float, ell: float, r: float, tol: float = DEFAULT_TOL
) -> SeriesValue:
    """
    P(-ℓ < min, max < r) for one Brownian bridge from 0 to 0:

        Σ_n [e^{-2n²(ℓ+r)²/T} - e^{-2(n(ℓ+r)+ℓ)²/T}]
    """
    _check_common(1, T, {"ell": ell, "r": r})
    width = ell + r
    decay = 2.0 * width * width / T
    return _lattice_sum(
        lambda n: np.exp(-2.0 * (n * width) ** 2 / T)
        - np.exp(-2.0 * (n * width + ell) ** 2 / T),
        decay,
        tol,
    )


# =============================================================================
# Grid evaluation
# =============================================================================

def evaluate_grid(
    fn: Callable[[float], CdfEvaluation], points: Sequence[float], workers: int = 1
) -> list[CdfEvaluation]:
    """Evaluate `fn` at every grid point on `workers` threads, in grid order."""
    calls = [partial(fn, p) for p in points]
    return run_in_threads(calls, workers)
