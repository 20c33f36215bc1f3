"""
Tests for dense determinants and pfaffians.
"""

import math

import numpy as np
import pytest

from src.errors import DomainError, NotAntisymmetric, OddDimension
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
from tests.oracles import cofactor_determinant, pfaffian_by_pairings, pfaffian_schur

# =============================================================================
# Fixtures
# =============================================================================


@pytest.fixture
def rng():
    """Seeded generator for random test matrices."""
    return np.random.default_rng(1729)


def random_skew(rng, n):
    g = rng.standard_normal((n, n))
    return g - g.T


# =============================================================================
# Determinant
# =============================================================================

class TestDeterminant:
    """Tests for the equilibrated LU determinant."""

    def test_matches_cofactor_expansion(self, rng):
        """Random 1x1 to 6x6 matrices agree with Laplace expansion."""
        for n in range(1, 7):
            m = rng.standard_normal((n, n))
            expected = cofactor_determinant(m)
            assert determinant(m) == pytest.approx(expected, rel=1e-12, abs=1e-14)

    def test_badly_scaled_rows(self):
        """Entries spanning 400 decades stay representable in log space."""
        m = np.diag([1e-200, 1e200, 3.0])
        m[0, 1] = 1e-190
        sign, log_abs = log_determinant(m)
        assert sign == 1.0
        assert log_abs == pytest.approx(math.log(3.0), abs=1e-12)

    def test_singular(self):
        """A rank-deficient matrix has determinant zero."""
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert log_determinant(m) == (0.0, -math.inf)
        assert determinant(m) == 0.0

    def test_empty(self):
        """The 0x0 determinant is 1."""
        assert determinant(np.zeros((0, 0))) == 1.0

    def test_non_square(self):
        """Non-square input is rejected."""
        with pytest.raises(DomainError):
            determinant(np.zeros((2, 3)))


# =============================================================================
# Pfaffian
# =============================================================================

class TestPfaffian:
    """Tests for the Parlett-Reid pfaffian."""

    def test_two_by_two_convention(self):
        """Pf [[0, a], [-a, 0]] = a."""
        assert pfaffian([[0.0, 2.5], [-2.5, 0.0]]) == 2.5
        assert pfaffian([[0.0, -1.0], [1.0, 0.0]]) == -1.0

    def test_four_by_four_formula(self):
        """Pf = a12 a34 - a13 a24 + a14 a23."""
        a12, a13, a14, a23, a24, a34 = 1.0, 2.0, 3.0, 4.0, 5.0, 6.0
        a = np.array([
            [0, a12, a13, a14],
            [-a12, 0, a23, a24],
            [-a13, -a23, 0, a34],
            [-a14, -a24, -a34, 0],
        ])
        assert pfaffian(a) == pytest.approx(a12 * a34 - a13 * a24 + a14 * a23, rel=1e-14)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_matches_pairing_enumeration(self, rng, n):
        """Random matrices agree with the expansion over perfect pairings."""
        a = random_skew(rng, n)
        assert pfaffian(a) == pytest.approx(pfaffian_by_pairings(a), rel=1e-11)

    @pytest.mark.parametrize("n", [4, 10])
    def test_matches_schur_form(self, rng, n):
        """Random matrices agree with the real Schur-form evaluation."""
        a = random_skew(rng, n)
        assert pfaffian(a) == pytest.approx(pfaffian_schur(a), rel=1e-10)

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_square_is_determinant(self, rng, n):
        """Pf(A)² = det(A)."""
        a = random_skew(rng, n)
        det = determinant(a)
        assert pfaffian(a) ** 2 == pytest.approx(det, rel=1e-10)

    def test_congruence(self, rng):
        """Pf(B A Bᵀ) = det(B) Pf(A)."""
        a = random_skew(rng, 6)
        b = rng.standard_normal((6, 6))
        assert pfaffian(b @ a @ b.T) == pytest.approx(determinant(b) * pfaffian(a), rel=1e-10)

    def test_wide_dynamic_range(self):
        """Symmetric scaling keeps tiny and huge blocks exact."""
        a = np.zeros((4, 4))
        a[0, 1], a[2, 3] = 1e-180, 1e170
        a = a - a.T
        sign, log_abs = log_pfaffian(a)
        assert sign == 1.0
        assert log_abs == pytest.approx(math.log(1e-180) + math.log(1e170), rel=1e-14)

    def test_odd_dimension(self):
        """Odd dimensions raise OddDimension."""
        with pytest.raises(OddDimension):
            pfaffian(np.zeros((3, 3)))

    def test_not_antisymmetric(self):
        """A symmetric part beyond round-off is rejected."""
        with pytest.raises(NotAntisymmetric):
            pfaffian([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(NotAntisymmetric):
            AntisymmetricMatrix.from_array(np.zeros((2, 3)))

    def test_entries_are_read_only(self):
        """Stored entries cannot be mutated."""
        matrix = AntisymmetricMatrix.from_array([[0.0, 1.0], [-1.0, 0.0]])
        with pytest.raises(ValueError):
            matrix.entries[0, 1] = 5.0


class TestPadSkew:
    """Tests for bordering odd-dimensional cores."""

    def test_even_core_unchanged(self):
        """An even core is returned as is."""
        core = np.array([[0.0, 0.3], [-0.3, 0.0]])
        assert pad_skew(core, [1.0, 1.0]).dim == 2

    def test_odd_core_bordered(self):
        """An odd core gains the border column and its negative as last row."""
        core = np.array([[0.0, 0.4, 0.5], [-0.4, 0.0, 0.6], [-0.5, -0.6, 0.0]])
        padded = pad_skew(core, [1.0, 2.0, 3.0])
        assert padded.dim == 4
        np.testing.assert_array_equal(padded.entries[:3, 3], [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(padded.entries[3, :3], [-1.0, -2.0, -3.0])
        assert padded.entries[3, 3] == 0.0

    def test_single_particle(self):
        """N = 1 pads to [[0, b], [-b, 0]] with pfaffian b."""
        assert pfaffian(pad_skew(np.zeros((1, 1)), [0.7])) == pytest.approx(0.7)

    def test_border_length(self):
        """A border of the wrong length is rejected."""
        with pytest.raises(DomainError):
            pad_skew(np.zeros((3, 3)), [1.0, 2.0])


# =============================================================================
# Error Propagation
# =============================================================================

class TestSensitivity:
    """Tests for first-order error bounds."""

    def test_determinant_bound_covers_perturbation(self, rng):
        """The bound dominates the actual change for a small perturbation."""
        m = rng.standard_normal((4, 4))
        errors = np.full((4, 4), 1e-8)
        bound = determinant_sensitivity(m, errors)
        perturbed = m + 1e-8 * np.sign(rng.standard_normal((4, 4)))
        assert abs(determinant(perturbed) - determinant(m)) <= 1.01 * bound

    def test_pfaffian_bound_covers_perturbation(self, rng):
        """The pfaffian bound dominates an antisymmetric perturbation."""
        a = random_skew(rng, 6)
        bump = 1e-9 * random_skew(rng, 6) / 4.0
        errors = np.abs(bump) + 1e-30
        bound = pfaffian_sensitivity(a, errors)
        assert abs(pfaffian(a + bump) - pfaffian(a)) <= 1.01 * bound

    def test_zero_errors(self, rng):
        """Exact entries propagate no error."""
        assert determinant_sensitivity(np.eye(3), np.zeros((3, 3))) == 0.0
        assert pfaffian_sensitivity(random_skew(rng, 4), 0.0) == 0.0
