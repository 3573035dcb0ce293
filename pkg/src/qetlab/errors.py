"""Exception hierarchy.

Two families map onto the CLI exit codes: ValidationError (bad inputs,
exit 1) and NumericalError (a computation that could not be completed to
tolerance or hit a mathematical obstruction, exit 2).
"""


class QetError(Exception):
    """Base class for all package errors."""


class ValidationError(QetError):
    """Invalid input configuration (CLI exit code 1)."""


class GeometryViolation(ValidationError):
    """Region ordering or sign constraints violated."""


class SupportViolation(ValidationError):
    """A smearing profile sticks out of its assigned region."""


class ParameterViolation(ValidationError):
    """A profile or policy parameter is outside its admissible range."""


class DegenerateProfile(ValidationError):
    """A profile with vanishing gradient norm (constant profile)."""


class ConfigError(ValidationError):
    """Malformed run document or mode/config mismatch."""


class NumericalError(QetError):
    """A numerical computation failed (CLI exit code 2)."""


class NonConvergence(NumericalError):
    """Adaptive integration exhausted its subdivision budget.

    Carries the best value and error estimate reached so far.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class SingularKernel(NumericalError):
    """The integrand denominator vanishes on the integration domain."""


class RouteMismatch(NumericalError):
    """The two independent evaluation routes disagree beyond tolerance."""


class CoincidentPoints(NumericalError):
    """Point-split correlator evaluated at coincident image points."""


class KnotEvaluation(NumericalError):
    """Energy density requested exactly at a knot; take one-sided limits."""


class DivergentCost(NumericalError):
    """Squeeze cost diverges (vanishing slope or a slope discontinuity)."""


class NonFiniteFunctional(NumericalError):
    """Sampling function with a jump in sqrt(xi); functional diverges."""


class SolverFailure(NumericalError):
    """The variational linear solve failed."""
