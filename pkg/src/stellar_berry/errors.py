"""Exception types shared across the package."""


class StellarError(Exception):
    """Base class for all package errors."""


class InvalidInputError(StellarError, ValueError):
    """Input violates an operation's preconditions."""


class NumericalFailureError(StellarError, ArithmeticError):
    """A numerical routine did not reach the requested accuracy.

    Attributes
    ----------
    residuals : array-like or None
        Diagnostic residuals attached by the raising routine.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ResourceLimitError(StellarError, ValueError):
    """Problem size exceeds a documented limit."""


class DegeneratePairError(StellarError, ArithmeticError):
    """Two stars coincide where a pair quantity needs them distinct."""


class DiscontinuityError(StellarError, RuntimeError):
    """Tracking lost continuity between two consecutive samples.

    Attributes
    ----------
    step : int or None
        Index of the sample where continuity was lost.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InvalidStateError(StellarError, RuntimeError):
    """An object is not in the state an operation requires."""


class ClassificationError(InvalidInputError):
    """A state's star geometry is outside a measure's entanglement class."""
