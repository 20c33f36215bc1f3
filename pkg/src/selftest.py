"""
Self-test battery

A fixed set of invariant checks run by the `self-test` command: closed
forms at N = 1, positivity, scaling, reflection symmetry, normalization,
monotonicity and identities of the building blocks.
"""

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.special import erf

from src.config import DEFAULT_TOL
from src.diffusions.extremes import (
    bessel_height_n1_series,
    bridge_range_n1_series,
    cdf_bessel_H,
    cdf_bridge_joint_LR,
    cdf_meander_H,
    cdf_motion_joint_LR,
    meander_height_n1_series,
)
from src.diffusions.kernels import Chamber, OrderedConfiguration, survival_A
from src.diffusions.width import height_moment_from_cdf, height_moment_n1
from src.errors import NoncollidingError
from src.numerics.matalg import determinant, pfaffian
from src.numerics.specfun import poisson_lhs, poisson_prefactor, theta
from src.utils.documents import SelfTestCheck, SelfTestDocument

logger = logging.getLogger(__name__)

CheckOutcome = tuple[bool, str]
Check = Callable[[float], CheckOutcome]


def _worst(pairs: list[tuple[float, float]], bound: float) -> CheckOutcome:
    gap = max(abs(a - b) for a, b in pairs)
    return gap <= bound, f"max deviation {gap:.3e} (bound {bound:.0e})"


# =============================================================================
# Closed forms at N = 1
# =============================================================================

def check_bessel_n1(tol: float) -> CheckOutcome:
    pairs = [
        (cdf_bessel_H(1, 1.0, h, tol).value, bessel_height_n1_series(1.0, h, tol).value)
        for h in (0.3, 0.7, 1.0, 2.0)
    ]
    return _worst(pairs, 1e-10)


def check_meander_n1(tol: float) -> CheckOutcome:
    pairs = [
        (cdf_meander_H(1, 1.0, h, tol).value, meander_height_n1_series(1.0, h, tol).value)
        for h in (0.5, 1.0, 2.0)
    ]
    return _worst(pairs, 1e-10)


def check_bridge_n1(tol: float) -> CheckOutcome:
    pairs = [
        (cdf_bridge_joint_LR(1, 1.0, ell, r, tol).value,
         bridge_range_n1_series(1.0, ell, r, tol).value)
        for ell, r in ((0.5, 0.8), (1.0, 1.0), (0.3, 2.0))
    ]
    return _worst(pairs, 1e-10)


def check_height_moment_n1(tol: float) -> CheckOutcome:
    worst = 0.0
    for m in (2.0, 4.0):
        exact = height_moment_n1(m, 1.0)
        worst = max(worst, abs(height_moment_from_cdf(m, 1, 1.0, tol=tol) - exact) / exact)
    return worst <= 1e-6, f"max relative deviation {worst:.3e}"


# =============================================================================
# Structural invariants
# =============================================================================

def check_positivity(tol: float) -> CheckOutcome:
    lowest = math.inf
    for n in range(1, 5):
        values = [
            cdf_bridge_joint_LR(n, 1.0, 1.5, 1.5, tol).raw,
            cdf_motion_joint_LR(n, 1.0, 1.5, 2.0, tol).raw,
            cdf_bessel_H(n, 1.0, 1.5 + 0.5 * n, tol).raw,
            cdf_meander_H(n, 1.0, 2.0 + 0.5 * n, tol).raw,
        ]
        lowest = min(lowest, *values)
    return lowest > 0.0, f"smallest raw value {lowest:.3e}"


def check_scaling(tol: float) -> CheckOutcome:
    c = 2.0
    pairs = [
        (cdf_bessel_H(2, c * c, c * 1.1, tol).value, cdf_bessel_H(2, 1.0, 1.1, tol).value),
        (cdf_bridge_joint_LR(2, c * c, c * 0.7, c * 1.1, tol).value,
         cdf_bridge_joint_LR(2, 1.0, 0.7, 1.1, tol).value),
        (cdf_motion_joint_LR(2, c * c, c * 0.7, c * 1.1, tol).value,
         cdf_motion_joint_LR(2, 1.0, 0.7, 1.1, tol).value),
    ]
    return _worst(pairs, 1e-10)


def check_reflection(tol: float) -> CheckOutcome:
    pairs = [
        (cdf_bridge_joint_LR(n, 1.0, 0.7, 1.3, tol).value,
         cdf_bridge_joint_LR(n, 1.0, 1.3, 0.7, tol).value)
        for n in (2, 3)
    ]
    return _worst(pairs, 1e-10)


def check_normalization(tol: float) -> CheckOutcome:
    far, near = 8.0, 0.05
    worst = 0.0
    for n in range(1, 5):
        worst = max(
            worst,
            abs(1.0 - cdf_bessel_H(n, 1.0, far, tol).value),
            abs(1.0 - cdf_meander_H(n, 1.0, far, tol).value),
            abs(1.0 - cdf_bridge_joint_LR(n, 1.0, far, far, tol).value),
            abs(1.0 - cdf_motion_joint_LR(n, 1.0, far, far, tol).value),
            cdf_bessel_H(n, 1.0, near, tol).value,
            cdf_meander_H(n, 1.0, near, tol).value,
            cdf_bridge_joint_LR(n, 1.0, near, near, tol).value,
            cdf_motion_joint_LR(n, 1.0, near, near, tol).value,
        )
    return worst <= 1e-6, f"max distance from the limit {worst:.3e}"


def check_monotonicity(tol: float) -> CheckOutcome:
    hs = np.linspace(0.2, 3.0, 12)
    values = np.array([cdf_bessel_H(2, 1.0, float(h), tol).value for h in hs])
    drop = float(np.max(values[:-1] - values[1:], initial=0.0))
    return drop <= 1e-12, f"largest decrease {drop:.3e}"


# =============================================================================
# Building blocks
# =============================================================================

def check_pfaffian_square(tol: float) -> CheckOutcome:
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for dim in (2, 4, 6, 8):
        g = rng.standard_normal((dim, dim))
        a = g - g.T
        det = determinant(a)
        worst = max(worst, abs(pfaffian(a) ** 2 - det) / max(1.0, abs(det)))
    return worst <= 1e-10, f"max relative deviation {worst:.3e}"


def check_theta_symmetries(tol: float) -> CheckOutcome:
    u, v = 1.3, 0.4
    worst = 0.0
    for k in range(6):
        base = theta(k, u, v, tol)
        mirrored = theta(k, u, -v, tol)
        shifted = theta(k, u, v + u, tol)
        slack = 2.0 * base.tail_bound + 1e-13 * max(1.0, abs(base.value))
        worst = max(
            worst,
            abs(mirrored.value - (-1) ** k * base.value) / slack,
            abs(shifted.value - base.value) / slack,
        )
    return worst <= 1.0, f"worst deviation {worst:.3f} of the tail allowance"


def check_poisson_identity(tol: float) -> CheckOutcome:
    cases = [(0, 1.0, 0.3), (1, 0.8, 0.2), (2, 1.5, 0.7), (3, 2.0, 1.1), (4, 0.6, 0.1)]
    worst = 0.0
    for k, eta, xi in cases:
        lhs = poisson_lhs(k, eta, xi, tol).value
        rhs = poisson_prefactor(k, eta) * theta(
            k, math.sqrt(math.pi) * eta, math.sqrt(math.pi) * xi / eta, tol
        ).value
        worst = max(worst, abs(lhs - rhs) / max(1e-300, abs(rhs)))
    return worst <= 1e-10, f"max relative deviation {worst:.3e}"


def check_survival_two(tol: float) -> CheckOutcome:
    gap, s = 0.8, 1.0
    value = survival_A(s, OrderedConfiguration(Chamber.TYPE_A, (0.0, gap)))
    exact = float(erf(gap / (2.0 * math.sqrt(s))))
    return _worst([(value, exact)], 1e-12)


CHECKS: dict[str, Check] = {
    "bessel height at N=1 matches its series": check_bessel_n1,
    "meander height at N=1 matches its series": check_meander_n1,
    "bridge range at N=1 matches the image series": check_bridge_n1,
    "height moments at N=1 match the xi formula": check_height_moment_n1,
    "laws are positive for N=1..4": check_positivity,
    "Brownian scaling": check_scaling,
    "bridge reflection symmetry": check_reflection,
    "normalization limits": check_normalization,
    "bessel height law is monotone": check_monotonicity,
    "pfaffian squared equals determinant": check_pfaffian_square,
    "theta parity and periodicity": check_theta_symmetries,
    "Poisson summation identity": check_poisson_identity,
    "two-particle survival": check_survival_two,
}


def run_self_test(
    tol: float = DEFAULT_TOL, on_check: Callable[[SelfTestCheck], None] | None = None
) -> SelfTestDocument:
    """Run every check; a check that raises a library error counts as failed."""
    results = []
    for name, check in CHECKS.items():
        try:
            passed, detail = check(tol)
        except NoncollidingError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        result = SelfTestCheck(name=name, passed=passed, detail=detail)
        logger.debug("self-test %s: %s", name, "pass" if passed else "FAIL")
        if on_check is not None:
            on_check(result)
        results.append(result)
    n_passed = sum(r.passed for r in results)
    return SelfTestDocument(passed=n_passed, failed=len(results) - n_passed, checks=results)
