"""
Exception hierarchy shared by every superbunch module.
"""


class SuperbunchError(Exception):
    """Base class for all superbunch errors."""


class ContractViolation(SuperbunchError, ValueError):
    """A caller broke an operation's precondition."""


class DomainError(SuperbunchError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class RangeError(SuperbunchError, OverflowError):
    """A size or result exceeds what can be represented or enumerated."""


class NumericalError(SuperbunchError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message: str, diagnostics: dict = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FitError(NumericalError):
    """Curve fitting failed; diagnostics hold the best attempt so far."""


class ConfigError(SuperbunchError, ValueError):
    """Invalid experiment configuration. Messages start with the field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
