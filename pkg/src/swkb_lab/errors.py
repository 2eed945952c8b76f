"""Exception hierarchy shared by all swkb_lab modules."""


class SwkbLabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SwkbLabError, ValueError):
    """A point lies outside the superpotential's domain or on an open endpoint."""


class UnknownParameter(SwkbLabError, LookupError):
    """A constant required by a class formula is missing or not overridable."""


class ValidityError(SwkbLabError, ValueError):
    """Parameters fall outside the class validity region."""


class BracketError(SwkbLabError, RuntimeError):
    """No sign change was found before reaching a domain endpoint."""


class NoZeroCrossing(BracketError):
    """W never changes sign on the domain (broken supersymmetry)."""


class QuadratureError(SwkbLabError, RuntimeError):
    """The integrand produced a value that cannot be attributed to rounding."""


class NotConverged(SwkbLabError, RuntimeError):
    """An iterative refinement exhausted its budget."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BoxTooSmall(SwkbLabError, RuntimeError):
    """Enlarging the truncation box moved an eigenvalue beyond tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotConventional(SwkbLabError, ValueError):
    """An algebraic spectrum was requested for a non-conventional superpotential."""
