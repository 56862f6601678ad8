"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the region where an operation is defined."""


class GammaPoleError(DomainError):
    """Gamma evaluated at a non-positive integer."""


class PreconditionError(DomainError):
    """A check was asked to run on input that violates its contract."""


class UnsupportedFormError(TypeError):
    """The input leaves the closed class an exact operation works on."""


class NumericalError(ArithmeticError):
    """Base class for failures of a numerical method (CLI exit code 3)."""


class AccuracyError(NumericalError):
    """Quadrature/differencing could not reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InstabilityError(NumericalError):
    """Time stepping produced non-finite values."""

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer
