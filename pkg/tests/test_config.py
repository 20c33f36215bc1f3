"""
Tests for run configuration and tolerance resolution.
"""

import math

import pytest
from pydantic import ValidationError

from src.config import (
    DEFAULT_TOL,
    Command,
    GridSpec,
    Process,
    RunConfig,
    resolve_tolerance,
)
from src.errors import InputError


class TestResolveTolerance:
    """Flag, then NONCOLL_TOL, then the library default."""

    def test_default(self, monkeypatch):
        """Nothing set gives DEFAULT_TOL."""
        monkeypatch.delenv("NONCOLL_TOL", raising=False)
        assert resolve_tolerance() == DEFAULT_TOL

    def test_environment(self, monkeypatch):
        """NONCOLL_TOL is used when no flag is given."""
        monkeypatch.setenv("NONCOLL_TOL", "1e-8")
        assert resolve_tolerance() == 1e-8

    def test_flag_wins(self, monkeypatch):
        """An explicit flag overrides the environment."""
        monkeypatch.setenv("NONCOLL_TOL", "1e-8")
        assert resolve_tolerance(1e-10) == 1e-10

    def test_blank_environment(self, monkeypatch):
        """An empty variable counts as unset."""
        monkeypatch.setenv("NONCOLL_TOL", "  ")
        assert resolve_tolerance() == DEFAULT_TOL

    @pytest.mark.parametrize("raw", ["abc", "0", "-1e-9", "inf"])
    def test_invalid_environment(self, monkeypatch, raw):
        """Non-numeric or non-positive values are input errors."""
        monkeypatch.setenv("NONCOLL_TOL", raw)
        with pytest.raises(InputError):
            resolve_tolerance()

    def test_invalid_flag(self):
        """A non-positive flag is an input error."""
        with pytest.raises(InputError):
            resolve_tolerance(-1.0)


class TestGridSpec:
    """Tests for evenly spaced sweeps."""

    def test_points(self):
        """Endpoints are included."""
        assert GridSpec(axis="r", start=0.5, stop=4.0, count=8).points() == pytest.approx(
            [0.5 + 0.5 * i for i in range(8)]
        )

    def test_single_point(self):
        """count = 1 gives the start."""
        assert GridSpec(axis="h", start=1.0, stop=2.0, count=1).points() == [1.0]

    def test_bad_range(self):
        """min must be positive and not above max."""
        with pytest.raises(ValidationError):
            GridSpec(axis="h", start=0.0, stop=1.0, count=3)
        with pytest.raises(ValidationError):
            GridSpec(axis="h", start=2.0, stop=1.0, count=3)
        with pytest.raises(ValidationError):
            GridSpec(axis="q", start=1.0, stop=2.0, count=3)


class TestRunConfig:
    """Validation of CLI configurations."""

    def test_eval_needs_geometry(self):
        """A height law needs h."""
        with pytest.raises(ValidationError):
            RunConfig(command=Command.EVAL, process=Process.BESSEL)
        assert RunConfig(command=Command.EVAL, process=Process.BESSEL, h=1.0).h == 1.0

    def test_one_sided_default(self):
        """Missing ℓ or r default to 8√T."""
        config = RunConfig(command=Command.EVAL, process=Process.BRIDGE, T=4.0, r=1.0)
        assert config.geometry_value("ell") == pytest.approx(16.0)
        assert config.geometry_value("r") == 1.0

    def test_table_needs_grid(self):
        """Tables sweep at least two points."""
        with pytest.raises(ValidationError):
            RunConfig(command=Command.TABLE, process=Process.BESSEL)
        with pytest.raises(ValidationError):
            RunConfig(
                command=Command.TABLE,
                process=Process.BESSEL,
                grid=GridSpec(axis="h", start=1.0, stop=1.0, count=1),
            )

    def test_axis_must_fit_process(self):
        """A Bessel bridge has no r axis."""
        with pytest.raises(ValidationError):
            RunConfig(
                command=Command.TABLE,
                process=Process.BESSEL,
                grid=GridSpec(axis="r", start=1.0, stop=2.0, count=3),
            )

    def test_particle_limits(self):
        """Closed-form laws stop at N = 10, the oracle at N = 4."""
        assert RunConfig(command=Command.EVAL, N=10, h=2.0).N == 10
        with pytest.raises(ValidationError):
            RunConfig(command=Command.EVAL, N=11, h=2.0)
        with pytest.raises(ValidationError):
            RunConfig(command=Command.MC_COMPARE, N=5)

    def test_steps_power_of_two(self):
        """Oracle grids have a power-of-two number of steps, at least 64."""
        assert RunConfig(command=Command.MC_COMPARE, steps=128).steps == 128
        with pytest.raises(ValidationError):
            RunConfig(command=Command.MC_COMPARE, steps=100)
        with pytest.raises(ValidationError):
            RunConfig(command=Command.MC_COMPARE, steps=32)

    def test_moment_orders(self):
        """Moment orders exceed one."""
        with pytest.raises(ValidationError):
            RunConfig(command=Command.MOMENTS, moment_orders=[2.0, 1.0])

    def test_required_geometry(self):
        """Each process names its geometric arguments."""
        assert RunConfig(command=Command.SELF_TEST).required_geometry() == ("h",)
        width = RunConfig(command=Command.EVAL, process=Process.WIDTH, w=1.0)
        assert width.required_geometry() == ("w",)
        assert math.isclose(width.geometry_value("w"), 1.0)
