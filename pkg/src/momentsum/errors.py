"""Exception hierarchy.

The CLI maps :class:`MathDomainError` subclasses to exit code 3 and
:class:`NumericalError` subclasses to exit code 4.
"""


class MomentSumError(Exception):
    pass


class MathDomainError(MomentSumError, ValueError):
    pass


class InvalidParameterError(MathDomainError):
    pass


class TruncationError(MathDomainError):
    """Raised when an operation would read coefficients beyond the truncation."""


class NonInvertibleError(MathDomainError):
    pass


class ConfigurationError(MathDomainError):
    pass


class DomainError(MathDomainError):
    """A point or direction lies outside the region where a formula is valid."""


class SingularDirectionError(DomainError):
    def __init__(self, direction, singular):
        self.direction = direction
        self.singular = list(singular)
        angles = ", ".join(f"{a:.6f}" for a in self.singular)
        super().__init__(
            f"direction {direction:.6f} is too close to singular direction(s) [{angles}]"
        )


class NumericalError(MomentSumError, ArithmeticError):
    pass


class QuadratureError(NumericalError):
    def __init__(self, message, panels=None):
        self.panels = panels
        if panels is not None:
            message = f"{message} (panels used: {panels})"
        super().__init__(message)


class DivergentIntegralError(QuadratureError):
    pass


class PadeError(NumericalError):
    pass
