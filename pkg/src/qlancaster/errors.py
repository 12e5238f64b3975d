"""Exception types shared across the package."""


class QLancasterError(Exception):
    """Base class for all package errors."""


class DomainError(QLancasterError, ValueError):
    """A parameter lies outside its admissible domain."""


class RegimeError(QLancasterError, ValueError):
    """An operation was requested outside its convergence regime (e.g. |q| too close to 1)."""


class TruncationError(QLancasterError, ArithmeticError):
    """A truncated product/series could not reach the requested tolerance within the term budget."""


class ArityError(QLancasterError, TypeError):
    """Presence/absence of the second spatial argument does not match the weight kind."""


class AdaptError(QLancasterError, ArithmeticError):
    """Adaptive quadrature exhausted its panel budget before meeting the tolerance."""


class NormalizationError(QLancasterError, ArithmeticError):
    """A density table's total mass deviates too far from 1."""


class DivisionError(QLancasterError, ArithmeticError):
    """A marginal density underflowed where a normalized kernel value was requested."""


class SizeError(QLancasterError, ValueError):
    """A symbolic expansion was requested beyond the configured size guard."""


class VerificationFailure(QLancasterError, AssertionError):
    """An exact identity left a nonzero residual. Carries the residual polynomial."""

    def __init__(self, identity: str, residual) -> None:
        super().__init__(f"identity {identity!r} has nonzero residual: {residual}")
        self.identity = identity
        self.residual = residual
