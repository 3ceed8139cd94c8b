"""Exceptions raised by stalab.

Numerical precondition failures subclass ``ValueError`` so callers that only
care about bad input can catch that.
"""


class StalabError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(StalabError):
    """Malformed or unknown run configuration."""


class NumericalError(StalabError, ValueError):
    """A numerical precondition does not hold for the given input."""


class MultivectorParseError(NumericalError):
    pass


class NotABiform(NumericalError):
    pass


class NotEven(NumericalError):
    pass


class SingularVersor(NumericalError):
    pass


class SingularSpinor(NumericalError):
    pass


class OffShell(NumericalError):
    pass


class DegenerateBoost(NumericalError):
    pass


class NonClassicalBeta(NumericalError):
    pass


class BoundaryPoint(NumericalError):
    """Derivative requested at a grid node without a full stencil."""


class OffGridPoint(NumericalError):
    """Event does not coincide with a grid node."""


class NonUnitVelocity(NumericalError):
    pass


class NonPositiveDensity(NumericalError):
    pass


class SuperluminalSpeed(NumericalError):
    pass


class NonOrthonormalFrame(NumericalError):
    pass


class NonRotorInitial(NumericalError):
    pass


class NonOrthogonalSpin(NumericalError):
    pass
