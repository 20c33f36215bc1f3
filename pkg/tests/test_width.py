"""
Tests for the width distribution and height moments.
"""

import math

import pytest

from src.config import Process
from src.diffusions.extremes import cdf_bessel_H
from src.diffusions.width import cdf_width, height_moment_from_cdf, height_moment_n1
from src.errors import DomainError, NonPositiveTime


def kuiper_cdf(x: float) -> float:
    """Range of one standard Brownian bridge: 1 - 2 Σ_k (4k²x² - 1) e^{-2k²x²}."""
    return 1.0 - 2.0 * math.fsum(
        (4 * k * k * x * x - 1.0) * math.exp(-2 * k * k * x * x) for k in range(1, 40)
    )


class TestWidth:
    """Tests for cdf_width."""

    @pytest.mark.parametrize("w", [0.6, 1.0, 1.4, 2.2])
    def test_single_bridge_range(self, w):
        """At N = 1 the width is the range of a Brownian bridge."""
        assert cdf_width(1, 1.0, w).value == pytest.approx(kuiper_cdf(w), abs=1e-6)

    def test_scaled_range(self):
        """The range law scales with √T."""
        T = 2.0
        w = 1.3 * math.sqrt(T)
        assert cdf_width(1, T, w).value == pytest.approx(kuiper_cdf(1.3), abs=1e-6)

    def test_range_matches_bessel_height(self):
        """The bridge range and the Bessel-bridge maximum share one law."""
        assert cdf_width(1, 1.0, 1.0).value == pytest.approx(
            cdf_bessel_H(1, 1.0, 1.0).value, abs=1e-6
        )

    def test_two_bridges_wider(self):
        """Two bridges spread wider than one."""
        assert cdf_width(2, 1.0, 1.5).value < cdf_width(1, 1.0, 1.5).value

    @pytest.mark.parametrize("N", [1, 2])
    def test_normalization(self, N):
        """Within 1e-6 of 1 at 8√T and of 0 at 0.05√T."""
        T = 1.7
        assert cdf_width(N, T, 8.0 * math.sqrt(T)).value == pytest.approx(1.0, abs=1e-6)
        assert cdf_width(N, T, 0.05 * math.sqrt(T)).value == pytest.approx(0.0, abs=1e-6)

    def test_monotone(self):
        """P(W < w) is nondecreasing in w."""
        values = [cdf_width(2, 1.0, w).value for w in (0.8, 1.4, 2.0, 2.6, 3.2, 4.0)]
        assert all(b >= a - 1e-7 for a, b in zip(values, values[1:], strict=False))
        assert values[0] < values[-1]

    def test_bad_arguments(self):
        """w and T must be positive."""
        with pytest.raises(DomainError):
            cdf_width(1, 1.0, 0.0)
        with pytest.raises(NonPositiveTime):
            cdf_width(1, -1.0, 1.0)


class TestHeightMoments:
    """Tests for moments of the maximum height."""

    def test_second_moment_closed_form(self):
        """E[H²] = π²/6 for one Bessel bridge on [0, 1]."""
        assert height_moment_n1(2.0, 1.0) == pytest.approx(math.pi**2 / 6, rel=1e-12)

    def test_closed_form_scales(self):
        """E[H^m] scales like T^{m/2}."""
        assert height_moment_n1(4.0, 3.0) == pytest.approx(9.0 * height_moment_n1(4.0, 1.0))

    @pytest.mark.parametrize("m", [2.0, 3.0, 4.0])
    def test_from_cdf_matches_closed_form(self, m):
        """Integrating the tail of the N = 1 law recovers the closed form."""
        exact = height_moment_n1(m, 1.0)
        assert height_moment_from_cdf(m, 1, 1.0) == pytest.approx(exact, rel=1e-6)

    def test_meander_second_moment(self):
        """E[H²] = π²/3 for one Brownian meander on [0, 1]."""
        value = height_moment_from_cdf(2.0, 1, 1.0, process=Process.MEANDER)
        assert value == pytest.approx(math.pi**2 / 3, rel=1e-6)

    def test_more_particles_larger_moments(self):
        """The top of two Bessel bridges reaches higher on average."""
        assert height_moment_from_cdf(2.0, 2, 1.0) > height_moment_from_cdf(2.0, 1, 1.0)

    def test_order_must_exceed_one(self):
        """m <= 1 is rejected."""
        with pytest.raises(DomainError):
            height_moment_n1(1.0, 1.0)
        with pytest.raises(DomainError):
            height_moment_from_cdf(0.5, 1, 1.0)

    def test_only_height_processes(self):
        """Moments are defined for the Bessel bridge and the meander only."""
        with pytest.raises(DomainError):
            height_moment_from_cdf(2.0, 1, 1.0, process=Process.BRIDGE)
