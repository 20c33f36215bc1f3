"""
Deterministic quadrature

Adaptive Gauss-Kronrod integration on an interval and adaptive tensor
Gauss-Legendre integration over the ordered simplex {a < x1 < x2 < b}.

Integrands are vectorized: they receive numpy arrays of nodes and return
arrays of the same shape. A callable returning a scalar is broadcast. Integrands
must be safe for concurrent invocation; no state is kept between calls.
"""

import heapq
import logging
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray

from src.config import DEFAULT_TOL
from src.errors import DomainError, ToleranceNotMet

logger = logging.getLogger(__name__)

Integrand1D = Callable[[NDArray[np.float64]], Any]
Integrand2D = Callable[[NDArray[np.float64], NDArray[np.float64]], Any]

MAX_PANELS = 2**16
# Subdivision stops once the error estimate is within this factor of its rounding floor
ROUNDOFF_HEADROOM = 2.0

# 15-point Kronrod abscissae on [0, 1] (descending) and weights; the 7-point
# Gauss rule sits on the odd-indexed abscissae and the centre.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node set on [-1, 1]
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_KRONROD_W = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]

# Tensor Gauss-Legendre pair for the simplex rule
_GL_LOW = leggauss(8)
_GL_HIGH = leggauss(16)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    """Integral value with an aggregate error estimate."""

    value: float
    error_estimate: float
    evaluations: int

    def to_dict(self) -> dict:
        return asdict(self)


def _evaluate(f: Integrand1D, x: NDArray[np.float64]) -> NDArray[np.float64]:
    values = np.asarray(f(x), dtype=float)
    return np.broadcast_to(values, x.shape)


def _kronrod_panels(
    f: Integrand1D, lo: NDArray[np.float64], hi: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Apply the 7/15 pair to a batch of panels in one integrand call."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = _evaluate(f, x)
    if not np.all(np.isfinite(fx)):
        raise DomainError("integrand is not finite on the integration range")

    kronrod = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)

    # QUADPACK error heuristic
    mean = (kronrod / np.where(half == 0, 1.0, half)) * 0.5
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _KRONROD_W)
    resabs = np.abs(half) * (np.abs(fx) @ _KRONROD_W)
    err = np.abs(kronrod - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(floor > err, floor, err)
    return kronrod, err, floor


def _target(tol: float, rtol: float, value: float, floor: float) -> float:
    """Error level at which subdivision stops: requested accuracy or the rounding floor."""
    return max(tol, rtol * abs(value), ROUNDOFF_HEADROOM * floor)


def _check_tolerances(tol: float, rtol: float) -> None:
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if not 0.0 <= rtol < 1.0:
        raise DomainError(f"relative tolerance must lie in [0, 1), got {rtol}")


def integrate_1d(
    f: Integrand1D,
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    *,
    rtol: float = 0.0,
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """
    Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].

    The panel with the largest error estimate is bisected until the summed
    estimates fall below max(tol, rtol·|value|). Each panel's estimate is
    floored at 50·eps·∫|f|; once the sum is within ROUNDOFF_HEADROOM of the
    summed floors, further bisection cannot help and the result is returned
    with that estimate.

    Raises:
        DomainError: if a > b or f is not finite on [a, b].
        ToleranceNotMet: if `max_panels` panels do not reach the target.
    """
    if not a <= b:
        raise DomainError(f"integrate_1d needs a <= b, got [{a}, {b}]")
    _check_tolerances(tol, rtol)

    value, err, floor = _kronrod_panels(f, np.array([a], float), np.array([b], float))
    heap: list[tuple[float, float, float, float, float]] = [
        (-err[0], a, b, value[0], floor[0])
    ]
    total_value = float(value[0])
    total_err = float(err[0])
    total_floor = float(floor[0])
    evaluations = 15

    while total_err > _target(tol, rtol, total_value, total_floor):
        if len(heap) >= max_panels:
            raise ToleranceNotMet(
                f"integrate_1d: {len(heap)} panels, error {total_err:.3e} > tol {tol:.3e}"
            )
        neg_err, lo, hi, val, flo = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise ToleranceNotMet(
                f"integrate_1d: panel [{lo}, {hi}] cannot be split further "
                f"(error {total_err:.3e} > tol {tol:.3e})"
            )
        children, child_err, child_floor = _kronrod_panels(
            f, np.array([lo, mid]), np.array([mid, hi])
        )
        evaluations += 30
        total_value += float(children.sum()) - val
        total_err += float(child_err.sum()) + neg_err
        total_floor += float(child_floor.sum()) - flo
        for i, (left, right) in enumerate(((lo, mid), (mid, hi))):
            heapq.heappush(heap, (-child_err[i], left, right, children[i], child_floor[i]))

    # Re-sum to shed drift from the running totals
    total_value = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    if total_err > max(tol, rtol * abs(total_value)):
        logger.debug("integrate_1d [%g, %g]: rounding limited at err %.2e", a, b, total_err)
    logger.debug("integrate_1d [%g, %g]: %d panels, err %.2e", a, b, len(heap), total_err)
    return QuadResult(total_value, total_err, evaluations)


def _simplex_panel(
    g: Integrand2D,
    a: float,
    b: float,
    s0: float,
    s1: float,
    t0: float,
    t1: float,
) -> tuple[float, float, float]:
    """Low/high tensor rules on one (s, t) panel of the unit square, with the rounding floor."""
    estimates = []
    magnitude = 0.0
    for nodes, weights in (_GL_LOW, _GL_HIGH):
        s = 0.5 * (s1 - s0) * nodes + 0.5 * (s1 + s0)
        t = 0.5 * (t1 - t0) * nodes + 0.5 * (t1 + t0)
        ss, tt = np.meshgrid(s, t, indexing="ij")
        x1 = a + ss * (b - a)
        x2 = x1 + tt * (b - x1)
        jac = (b - a) * (b - x1)
        gx = np.broadcast_to(np.asarray(g(x1, x2), dtype=float), x1.shape)
        if not np.all(np.isfinite(gx)):
            raise DomainError("integrand is not finite on the simplex")
        w = np.outer(weights, weights) * 0.25 * (s1 - s0) * (t1 - t0)
        estimates.append(float(np.sum(w * jac * gx)))
        magnitude = float(np.sum(w * jac * np.abs(gx)))
    low, high = estimates
    floor = 50.0 * _EPS * magnitude
    return high, max(abs(high - low), floor), floor


def integrate_ordered_2d(
    g: Integrand2D,
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    *,
    rtol: float = 0.0,
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """
    Integrate g(x1, x2) over {a < x1 < x2 < b}.

    The simplex is mapped onto the unit square by x1 = a + s(b - a),
    x2 = x1 + t(b - x1). The square is refined by quartering the panel with
    the largest |Q16 - Q8| tensor Gauss-Legendre discrepancy, under the same
    stopping rule as integrate_1d.
    """
    if not a <= b:
        raise DomainError(f"integrate_ordered_2d needs a <= b, got [{a}, {b}]")
    _check_tolerances(tol, rtol)
    per_panel = len(_GL_LOW[0]) ** 2 + len(_GL_HIGH[0]) ** 2

    value, err, floor = _simplex_panel(g, a, b, 0.0, 1.0, 0.0, 1.0)
    heap: list[tuple[float, float, float, float, float, float, float]] = [
        (-err, 0.0, 1.0, 0.0, 1.0, value, floor)
    ]
    total_value, total_err, total_floor = value, err, floor
    evaluations = per_panel

    while total_err > _target(tol, rtol, total_value, total_floor):
        if len(heap) + 3 > max_panels:
            raise ToleranceNotMet(
                f"integrate_ordered_2d: {len(heap)} panels, "
                f"error {total_err:.3e} > tol {tol:.3e}"
            )
        neg_err, s0, s1, t0, t1, val, flo = heapq.heappop(heap)
        sm, tm = 0.5 * (s0 + s1), 0.5 * (t0 + t1)
        if not (s0 < sm < s1 and t0 < tm < t1):
            raise ToleranceNotMet("integrate_ordered_2d: panel cannot be split further")
        total_value -= val
        total_err += neg_err
        total_floor -= flo
        for box in ((s0, sm, t0, tm), (sm, s1, t0, tm), (s0, sm, tm, t1), (sm, s1, tm, t1)):
            child, child_err, child_floor = _simplex_panel(g, a, b, *box)
            evaluations += per_panel
            total_value += child
            total_err += child_err
            total_floor += child_floor
            heapq.heappush(heap, (-child_err, *box, child, child_floor))

    total_value = math.fsum(item[5] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    logger.debug("integrate_ordered_2d [%g, %g]: %d panels, err %.2e", a, b, len(heap), total_err)
    return QuadResult(total_value, total_err, evaluations)
