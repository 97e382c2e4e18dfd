"""Exception hierarchy shared by all modules.

The CLI maps :class:`DomainError` to exit status 1 and :class:`AccuracyError`
to exit status 2.
"""


class BergdbarError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BergdbarError, ValueError):
    """An argument lies outside the domain of an operation."""


class UnsupportedModelError(DomainError):
    """The requested computation has no implementation for this model."""


class UnsupportedDegreeError(DomainError):
    """The form degree is not handled by the operation."""


class ParseError(DomainError):
    """A model, profile or input-file string could not be parsed."""


class ClosednessError(DomainError):
    """The right-hand side of the d-bar equation is not closed."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending


class SingularBlockError(DomainError):
    """A degree block of the Laplacian has a nontrivial kernel."""

    def __init__(self, message, kernel=None):
        super().__init__(message)
        self.kernel = kernel


class PositivityError(DomainError):
    """A metric positivity hypothesis fails on the sampling grid."""


class AccuracyError(BergdbarError, ArithmeticError):
    """A numerical procedure did not reach its accuracy target."""


class DivergenceError(AccuracyError):
    """The requested integral does not converge."""
