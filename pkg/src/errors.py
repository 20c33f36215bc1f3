"""
Error hierarchy.

Library code raises these; only the CLI catches them and maps the two
families onto exit statuses (InputError -> 1, NumericalError -> 2).
"""


class NoncollidingError(Exception):
    """Base class for all errors raised by this package."""

    exit_status: int = 2


# =============================================================================
# Validation errors (exit status 1)
# =============================================================================

class InputError(NoncollidingError, ValueError):
    """Arguments violate a precondition."""

    exit_status = 1


class NonPositivePeriod(InputError):
    """A theta or Poisson series was given a non-positive period."""


class DomainError(InputError):
    """An argument lies outside the mathematical domain of the function."""


class OddDimension(InputError):
    """A pfaffian was requested for an odd-dimensional matrix."""


class NotAntisymmetric(InputError):
    """A matrix expected to satisfy A = -A^T does not."""


class NonPositiveTime(InputError):
    """A transition kernel was evaluated at t <= 0."""


class OutOfInterval(InputError):
    """A coordinate lies on or outside an absorbing boundary."""


class ChamberMismatch(InputError):
    """Two configurations do not live in the same Weyl chamber."""


class OutOfWindow(InputError):
    """A time lies outside [0, T]."""


class DimensionTooLarge(InputError):
    """The particle count exceeds the supported range of an operation."""


class StatisticUndefined(InputError):
    """The requested extreme statistic does not exist for the process kind."""


# =============================================================================
# Numerical failures (exit status 2)
# =============================================================================

class NumericalError(NoncollidingError, ArithmeticError):
    """A computation could not meet its accuracy contract."""

    exit_status = 2


class ToleranceNotMet(NumericalError):
    """Quadrature or differentiation exhausted its budget above tolerance."""


class AcceptanceTooLow(NumericalError):
    """Rejection sampling is infeasible for the requested parameters."""


class AssemblyError(NumericalError):
    """An assembled probability fell outside its admissible range."""
