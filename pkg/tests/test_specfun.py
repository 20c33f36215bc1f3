"""
Tests for the special functions.

Hermite polynomials, the Hermite-theta series in both representations,
the error-function integrals and the zeta/xi values.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import erf, zeta

from src.errors import DomainError, NonPositivePeriod
from src.numerics.specfun import (
    DUAL_CROSSOVER,
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
from tests.oracles import hermite_exact, riemann_sum_rectangle, theta_wide_window

# =============================================================================
# Fixtures
# =============================================================================

POISSON_BATTERY = [
    (0, 0.5, 0.0),
    (0, 1.0, 0.3),
    (1, 0.8, 0.2),
    (2, 1.5, 0.7),
    (3, 2.0, 1.1),
    (4, 0.6, 0.1),
    (5, 1.2, 0.45),
    (6, 2.5, 2.0),
]


@pytest.fixture
def sample_points():
    """Rational evaluation points for the exact Hermite oracle."""
    return [Fraction(-5, 2), Fraction(-1, 3), Fraction(0), Fraction(7, 10), Fraction(3, 1)]


# =============================================================================
# Hermite Polynomials
# =============================================================================

class TestHermite:
    """Tests for the recurrence-based Hermite polynomials."""

    def test_low_degrees(self):
        """H_0 = 1, H_1 = 2x, H_3 = 8x³ - 12x."""
        assert hermite(0, 0.7) == 1.0
        assert hermite(1, 0.7) == pytest.approx(1.4)
        assert hermite(3, 2.0) == pytest.approx(8 * 8 - 24)

    def test_matches_exact_factorial_sum(self, sample_points):
        """Degrees up to 12 agree with the exact rational formula."""
        for k in range(13):
            for x in sample_points:
                exact = float(hermite_exact(k, x))
                assert hermite(k, float(x)) == pytest.approx(exact, rel=1e-12, abs=1e-9)

    def test_parity(self):
        """H_k(-x) = (-1)^k H_k(x)."""
        for k in range(9):
            assert hermite(k, -1.3) == pytest.approx((-1) ** k * hermite(k, 1.3), rel=1e-14)

    def test_vectorized(self):
        """Arrays come back elementwise with the input shape."""
        xs = np.linspace(-2, 2, 6).reshape(2, 3)
        out = hermite(4, xs)
        assert out.shape == (2, 3)
        assert out[1, 2] == pytest.approx(hermite(4, float(xs[1, 2])))

    def test_negative_degree(self):
        """Negative degrees are rejected."""
        with pytest.raises(DomainError):
            hermite(-1, 0.5)


# =============================================================================
# Theta Series
# =============================================================================

class TestTheta:
    """Tests for Θ_k(u, v) by direct summation."""

    @pytest.mark.parametrize("k", [0, 1, 2, 5, 8])
    @pytest.mark.parametrize("u,v", [(2.0, 0.0), (1.8, 0.35), (3.5, -1.2)])
    def test_matches_wide_window(self, k, u, v):
        """The truncated sum agrees with a much wider plain summation."""
        result = theta(k, u, v)
        reference = theta_wide_window(k, u, v)
        assert abs(result.value - reference) <= 1e-10 * max(1.0, abs(reference))

    def test_tail_bound_is_tiny(self):
        """The reported remainder bound sits far below the tolerance."""
        result = theta(4, 2.0, 0.3, tol=1e-12)
        assert 0 <= result.tail_bound < 1e-12
        assert result.terms_used >= 3

    def test_parity_in_v(self):
        """Θ_k(u, -v) = (-1)^k Θ_k(u, v)."""
        for k in range(6):
            assert theta(k, 2.2, -0.4).value == pytest.approx(
                (-1) ** k * theta(k, 2.2, 0.4).value, rel=1e-12, abs=1e-14
            )

    def test_periodic_in_v(self):
        """Shifting v by u reindexes the lattice sum."""
        for k in range(6):
            assert theta(k, 1.9, 0.3 + 1.9).value == pytest.approx(
                theta(k, 1.9, 0.3).value, rel=1e-11, abs=1e-13
            )

    def test_nonpositive_period(self):
        """u <= 0 raises NonPositivePeriod."""
        with pytest.raises(NonPositivePeriod):
            theta(2, 0.0, 0.1)
        with pytest.raises(NonPositivePeriod):
            theta(2, -1.0, 0.1)


class TestPoissonIdentity:
    """Tests for the dual series and the Poisson summation identity."""

    @pytest.mark.parametrize("k,eta,xi", POISSON_BATTERY)
    def test_both_sides_agree(self, k, eta, xi):
        """Σ n^k e^{-πn²/η² + 2πiξn/η²} equals prefactor × Θ_k(√π η, √π ξ/η)."""
        lhs = poisson_lhs(k, eta, xi).value
        rhs = poisson_prefactor(k, eta) * theta(
            k, math.sqrt(math.pi) * eta, math.sqrt(math.pi) * xi / eta
        ).value
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)

    def test_prefactor_signs(self):
        """The sign cycles +, +, -, - with k."""
        signs = [math.copysign(1.0, poisson_prefactor(k, 1.0)) for k in range(8)]
        assert signs == [1, 1, -1, -1, 1, 1, -1, -1]

    @pytest.mark.parametrize("k", [0, 1, 2, 3, 6])
    def test_dual_matches_direct(self, k):
        """Below the crossover both representations give the same Θ_k."""
        u, v = 1.0, 0.27
        assert theta_dual(k, u, v).value == pytest.approx(
            theta_wide_window(k, u, v), rel=1e-10, abs=1e-12
        )

    def test_series_routes_by_period(self):
        """theta_series takes the dual path below √π and the direct path above."""
        small, large = 0.5 * DUAL_CROSSOVER, 2.0 * DUAL_CROSSOVER
        assert theta_series(2, small, 0.1).value == pytest.approx(
            theta_dual(2, small, 0.1).value, rel=1e-14
        )
        assert theta_series(2, large, 0.1).value == theta(2, large, 0.1).value

    def test_small_period_keeps_relative_accuracy(self):
        """Θ_2(u, 0) at small u is dominated by the m = ±1 dual terms."""
        u = 0.3
        eta = u / math.sqrt(math.pi)
        value = theta_series(2, u, 0.0).value
        leading = 2.0 * math.exp(-math.pi / eta**2) / poisson_prefactor(2, eta)
        assert value < 0.0
        assert value == pytest.approx(leading, rel=1e-12)

    def test_vectorized_values(self):
        """theta_values agrees with the scalar evaluations in both regimes."""
        vs = np.array([0.0, 0.2, 0.45])
        for u in (0.8, 2.4):
            values, tail = theta_values(3, u, vs)
            assert tail >= 0
            for v, value in zip(vs, values, strict=True):
                assert value == pytest.approx(theta_series(3, u, float(v)).value, rel=1e-10, abs=1e-13)


# =============================================================================
# Error-function Integrals
# =============================================================================

class TestPsi:
    """Tests for Ψ(u) and Ψ(u1, u2)."""

    def test_psi_is_erf(self):
        """Ψ(u) = erf(u), including the limits."""
        assert psi(0.0) == 0.0
        assert psi(1.0) == pytest.approx(erf(1.0), rel=1e-15)
        assert psi(40.0) == 1.0
        np.testing.assert_allclose(psi(np.array([0.1, 2.0])), erf([0.1, 2.0]))

    def test_psi2_vanishes_on_diagonal(self):
        """Ψ(u, u) = 0: both integration regions are empty."""
        assert psi2(0.7, 0.7) == 0.0

    def test_psi2_far_apart_is_one(self):
        """Particles far from the wall and from each other survive surely."""
        assert psi2(6.0, 14.0) == pytest.approx(1.0, abs=1e-8)

    def test_psi2_is_a_probability(self):
        """Intermediate values lie in (0, 1) and grow with separation."""
        near = psi2(0.5, 1.0)
        far = psi2(0.5, 2.0)
        assert 0.0 < near < far < 1.0

    def test_psi2_matches_riemann_sum(self):
        """Ψ(0.5, 1) against Richardson-extrapolated midpoint sums to 1e-8."""

        def g(v1, v2):
            return np.exp(-v1 * v1 - (v1 - v2) ** 2)

        def dense(x_range, y_range):
            coarse = riemann_sum_rectangle(g, x_range, y_range, n=600)
            fine = riemann_sum_rectangle(g, x_range, y_range, n=1200)
            return (4.0 * fine - coarse) / 3.0

        exact = 2.0 / math.pi * (dense((0.0, 0.5), (-0.5, 0.5)) - dense((0.5, 1.0), (0.5, 1.5)))
        assert psi2(0.5, 1.0) == pytest.approx(exact, abs=1e-8)


# =============================================================================
# Zeta and Xi
# =============================================================================

class TestZeta:
    """Tests for ζ(m) and ξ(m)."""

    def test_even_values(self):
        """ζ(2) = π²/6 and ζ(4) = π⁴/90."""
        assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)
        assert riemann_zeta(4.0) == pytest.approx(math.pi**4 / 90, rel=1e-14)

    @pytest.mark.parametrize("m", [1.05, 1.5, 3.3, 7.0, 20.0])
    def test_matches_scipy(self, m):
        """Agreement with scipy.special.zeta."""
        assert riemann_zeta(m) == pytest.approx(float(zeta(m)), rel=1e-13)

    def test_xi_closed_forms(self):
        """ξ(2) = π/6 and ξ(4) = π²/15."""
        assert riemann_xi(2.0) == pytest.approx(math.pi / 6, rel=1e-13)
        assert riemann_xi(4.0) == pytest.approx(math.pi**2 / 15, rel=1e-13)

    def test_domain(self):
        """m <= 1 is rejected."""
        with pytest.raises(DomainError):
            riemann_xi(1.0)
        with pytest.raises(DomainError):
            riemann_zeta(0.5)
