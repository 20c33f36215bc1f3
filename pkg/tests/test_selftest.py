"""
Tests for the self-test battery.
"""

import pytest

from src import selftest
from src.errors import ToleranceNotMet
from src.selftest import CHECKS, run_self_test


class TestSelfTest:
    """Tests for run_self_test."""

    def test_all_checks_pass(self):
        """The battery passes at the default tolerance."""
        document = run_self_test()
        failures = [c for c in document.checks if not c.passed]
        assert failures == []
        assert document.passed == len(CHECKS)

    def test_callback_sees_every_check(self, monkeypatch):
        """on_check is called once per check, in order."""
        monkeypatch.setattr(
            selftest, "CHECKS", {"first": lambda tol: (True, "a"), "second": lambda tol: (False, "b")}
        )
        seen = []
        document = run_self_test(on_check=seen.append)
        assert [c.name for c in seen] == ["first", "second"]
        assert (document.passed, document.failed) == (1, 1)

    def test_library_error_is_a_failure(self, monkeypatch):
        """A check raising a library error is recorded as failed."""

        def broken(tol):
            raise ToleranceNotMet("budget exhausted")

        monkeypatch.setattr(selftest, "CHECKS", {"broken": broken})
        document = run_self_test()
        assert document.failed == 1
        assert "ToleranceNotMet" in document.checks[0].detail

    @pytest.mark.parametrize("name", sorted(CHECKS))
    def test_check_details(self, name):
        """Every check reports a detail string."""
        passed, detail = CHECKS[name](1e-12)
        assert passed
        assert detail
