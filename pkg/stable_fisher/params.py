"""Stable law parameters and the quantities derived from them."""

from __future__ import annotations

import math
import typing as t
from dataclasses import dataclass
from functools import lru_cache

from stable_fisher.exceptions import InvalidParameterError

BETA_MAX = 0.999
ALPHA_MIN = 1.0
ALPHA_MAX = 2.0

PARAM_NAMES: tuple[str, ...] = ("mu", "sigma", "alpha", "beta")


def check_shape(alpha: float, beta: float) -> None:
    """Validate the shape pair (alpha, beta).

    Args:
        alpha: Characteristic exponent, must lie in (1, 2].
        beta: Skewness, must satisfy |beta| <= BETA_MAX.

    Raises:
        InvalidParameterError: If either value is out of range.
    """
    if not (math.isfinite(alpha) and ALPHA_MIN < alpha <= ALPHA_MAX):
        msg = f"alpha must lie in (1, 2], got {alpha!r}"
        raise InvalidParameterError(msg)
    if not (math.isfinite(beta) and abs(beta) <= BETA_MAX):
        msg = f"beta must satisfy |beta| <= {BETA_MAX}, got {beta!r}"
        raise InvalidParameterError(msg)


@dataclass(frozen=True)
class StableParams:
    """Location, scale, characteristic exponent and skewness."""

    mu: float = 0.0
    sigma: float = 1.0
    alpha: float = 2.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        """Reject parameters outside the supported ranges."""
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            msg = f"sigma must be positive, got {self.sigma!r}"
            raise InvalidParameterError(msg)
        if not math.isfinite(self.mu):
            msg = f"mu must be finite, got {self.mu!r}"
            raise InvalidParameterError(msg)
        check_shape(self.alpha, self.beta)

    @property
    def delta(self) -> float:
        """Distance to the Gaussian boundary, 2 - alpha."""
        return ALPHA_MAX - self.alpha

    def replace(self, **changes: float) -> StableParams:
        """Return a copy with some fields changed."""
        values: dict[str, t.Any] = {name: getattr(self, name) for name in PARAM_NAMES}
        values.update(changes)
        return StableParams(**values)


@dataclass(frozen=True)
class DerivedQuantities:
    """Mode shift zeta, lower endpoint offset varrho and delta = 2 - alpha."""

    zeta: float
    varrho: float
    delta: float

    def varrho_star(self, x: float) -> float:
        """Return varrho * sgn(x - zeta)."""
        return self.varrho * _sign(x - self.zeta)


def _sign(value: float) -> float:
    if value > 0:
        return 1.0
    if value < 0:
        return -1.0
    return 0.0


@lru_cache(maxsize=4096)
def derive_shape(alpha: float, beta: float) -> DerivedQuantities:
    """Compute zeta, varrho and delta for a standard (alpha, beta) pair.

    Args:
        alpha: Characteristic exponent in (1, 2].
        beta: Skewness.

    Returns:
        The derived quantities. At alpha = 2 zeta and varrho are exactly 0.
    """
    check_shape(alpha, beta)
    delta = ALPHA_MAX - alpha
    if alpha == ALPHA_MAX or beta == 0:
        return DerivedQuantities(zeta=0.0, varrho=0.0, delta=delta)
    tan_half = math.tan(math.pi * alpha / 2)
    zeta = -beta * tan_half
    varrho = 2.0 / (math.pi * alpha) * math.atan(beta * tan_half)
    return DerivedQuantities(zeta=zeta, varrho=varrho, delta=delta)


def derive(p: StableParams) -> DerivedQuantities:
    """Compute the derived quantities of a parameter set."""
    return derive_shape(p.alpha, p.beta)


def standardize(x: float, p: StableParams) -> tuple[float, float]:
    """Map x to standard coordinates.

    Returns:
        ``(x_std, scale)`` with ``x_std = (x - mu) / sigma`` and ``scale = 1 / sigma``.
    """
    return (x - p.mu) / p.sigma, 1.0 / p.sigma


def beta_star(x: float, alpha: float, beta: float) -> float:
    """Return beta * sgn(x - zeta) at standard parameters."""
    return beta * _sign(x - derive_shape(alpha, beta).zeta)
