"""Exception types raised by stable-fisher."""

from __future__ import annotations


class StableInfoError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(StableInfoError, ValueError):
    """A (mu, sigma, alpha, beta) value lies outside its supported range."""


class DomainError(StableInfoError, ValueError):
    """A function was evaluated outside the domain where it is defined."""


class RegimeMismatchError(DomainError):
    """An expansion was requested outside the scale where it is valid."""


class SingularPointError(DomainError):
    """Evaluation at a point where the representation is singular (x = zeta)."""


class UnderflowError(StableInfoError, ArithmeticError):
    """The density is too small for a score ratio to be meaningful."""


class NonConvergenceError(StableInfoError, RuntimeError):
    """Adaptive quadrature stopped before reaching the requested tolerance."""

    def __init__(self, msg: str, best_estimate: float, abs_error: float) -> None:
        """Store the best estimate alongside the message.

        Args:
            msg: Human readable description.
            best_estimate: Value reached when the integrator gave up.
            abs_error: Error estimate attached to ``best_estimate``.
        """
        super().__init__(msg)
        self.best_estimate = best_estimate
        self.abs_error = abs_error
