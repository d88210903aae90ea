"""Closed-form approximants near the Gaussian boundary.

The density splits into a Gaussian core and a power tail,

    g(x) = F1(x) + F2(x),  F1 = f(x - zeta; 2),  F2 = (1 + beta*) delta |x - zeta|**(delta - 3)

with beta* = beta sgn(x - zeta). The core dominates inside
(2 - d) sqrt(log(1/delta)) and the tail outside (2 + d) sqrt(log(1/delta)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import special

from stable_fisher.density import gaussian_density
from stable_fisher.exceptions import DomainError
from stable_fisher.params import ALPHA_MAX, beta_star, check_shape, derive_shape

DEFAULT_DELTA_KNOB = 0.5
DEFAULT_TAIL_START = 5.0


def _offset(x: float, alpha: float, beta: float) -> float:
    check_shape(alpha, beta)
    return x - derive_shape(alpha, beta).zeta


def F1(x: float, alpha: float, beta: float) -> float:
    """Gaussian core f(x - zeta; 2)."""
    return gaussian_density(_offset(x, alpha, beta))


def F2(x: float, alpha: float, beta: float) -> float:
    """Power tail (1 + beta*) delta |x - zeta|**(delta - 3); infinite at zeta."""
    y = _offset(x, alpha, beta)
    if y == 0.0:
        return math.inf
    delta = ALPHA_MAX - alpha
    return (1.0 + beta_star(x, alpha, beta)) * delta * abs(y) ** (delta - 3.0)


def g_density(x: float, alpha: float, beta: float) -> float:
    """Core plus tail approximation of the density."""
    return F1(x, alpha, beta) + F2(x, alpha, beta)


def F1_prime(x: float, alpha: float, beta: float) -> float:
    """Derivative of the core, -((x - zeta)/2) f(x - zeta; 2)."""
    y = _offset(x, alpha, beta)
    return -0.5 * y * gaussian_density(y)


def F2_prime(x: float, alpha: float, beta: float) -> float:
    """Leading derivative of the tail, -3 (1 + beta*) delta |x - zeta|**(delta - 4) sgn."""
    y = _offset(x, alpha, beta)
    if y == 0.0:
        return math.nan
    delta = ALPHA_MAX - alpha
    magnitude = 3.0 * (1.0 + beta_star(x, alpha, beta)) * delta * abs(y) ** (delta - 4.0)
    return -math.copysign(magnitude, y)


def g_deriv(x: float, alpha: float, beta: float) -> float:
    """Derivative of the core plus tail approximation."""
    return F1_prime(x, alpha, beta) + F2_prime(x, alpha, beta)


class RegimeKind(str, enum.Enum):
    """Which part of the decomposition dominates at a point."""

    CORE = "core"
    CROSSOVER = "crossover"
    TAIL = "tail"


@dataclass(frozen=True)
class Regime:
    """A classified point with the boundaries used to classify it."""

    kind: RegimeKind
    boundary_low: float
    boundary_high: float
    delta_knob: float


def regime_boundaries(
    alpha: float, delta_knob: float = DEFAULT_DELTA_KNOB
) -> tuple[float, float]:
    """Return ((2 - d) sqrt(log 1/delta), (2 + d) sqrt(log 1/delta)).

    Raises:
        DomainError: If delta is not in (0, 1) or d is not in (0, 1).
    """
    delta = ALPHA_MAX - alpha
    if not 0.0 < delta < 1.0:
        msg = f"regime boundaries need 0 < delta < 1, got delta={delta!r}"
        raise DomainError(msg)
    if not 0.0 < delta_knob < 1.0:
        msg = f"delta_knob must lie in (0, 1), got {delta_knob!r}"
        raise DomainError(msg)
    root = math.sqrt(math.log(1.0 / delta))
    return (2.0 - delta_knob) * root, (2.0 + delta_knob) * root


def classify(
    x: float,
    alpha: float,
    delta_knob: float = DEFAULT_DELTA_KNOB,
    beta: float = 0.0,
) -> Regime:
    """Classify x as core, crossover or tail by its distance from zeta."""
    low, high = regime_boundaries(alpha, delta_knob)
    distance = abs(_offset(x, alpha, beta))
    if distance <= low:
        kind = RegimeKind.CORE
    elif distance >= high:
        kind = RegimeKind.TAIL
    else:
        kind = RegimeKind.CROSSOVER
    return Regime(kind=kind, boundary_low=low, boundary_high=high, delta_knob=delta_knob)


def score_mu_approx(x: float, alpha: float, beta: float) -> float:
    """Location score of the approximation, -g'/g."""
    return -g_deriv(x, alpha, beta) / g_density(x, alpha, beta)


def score_sigma_approx(x: float, alpha: float, beta: float) -> float:
    """Scale score of the approximation, (-g - (x - zeta) g') / g."""
    y = _offset(x, alpha, beta)
    return -1.0 - y * g_deriv(x, alpha, beta) / g_density(x, alpha, beta)


def score_mu_core(y: float) -> float:
    """Core branch of the location score, y / 2."""
    return 0.5 * y


def score_mu_tail(y: float) -> float:
    """Tail branch of the location score, 3 / y."""
    return 3.0 / y


def score_sigma_core(y: float) -> float:
    """Core branch of the scale score, y**2 / 2."""
    return 0.5 * y * y


def score_sigma_tail(_: float) -> float:
    """Tail branch of the scale score, the constant 2."""
    return 2.0


def _tail_offset(x: float, alpha: float, beta: float, tail_start: float) -> float:
    y = _offset(x, alpha, beta)
    if abs(y) < tail_start:
        msg = f"|x - zeta| = {abs(y)!r} is below the tail start {tail_start!r}"
        raise DomainError(msg)
    return y


def f_alpha_tail(
    x: float, alpha: float, beta: float, tail_start: float = DEFAULT_TAIL_START
) -> float:
    """Leading tail of df/dalpha, -(1 + beta*) |x - zeta|**(-(1 + alpha))."""
    y = _tail_offset(x, alpha, beta, tail_start)
    return -(1.0 + beta_star(x, alpha, beta)) * abs(y) ** (-(1.0 + alpha))


def f_beta_tail(
    x: float, alpha: float, beta: float, tail_start: float = DEFAULT_TAIL_START
) -> float:
    """Leading tail of df/dbeta, delta sgn(x - zeta) |x - zeta|**(-(1 + alpha))."""
    y = _tail_offset(x, alpha, beta, tail_start)
    delta = ALPHA_MAX - alpha
    return math.copysign(delta * abs(y) ** (-(1.0 + alpha)), y)


def tail_constant(alpha: float) -> float:
    """Coefficient k with f(x) ~ k (1 + beta*) |x|**(-(1 + alpha)).

    k = Gamma(alpha + 1) sin(pi alpha / 2) / pi, which is delta to first order.
    """
    return float(special.gamma(alpha + 1.0) * math.sin(0.5 * math.pi * alpha) / math.pi)


def tail_constant_prime(alpha: float) -> float:
    """Derivative of :func:`tail_constant` in alpha; -1 to first order in delta."""
    g = special.gamma(alpha + 1.0)
    angle = 0.5 * math.pi * alpha
    return float(
        g
        * (special.digamma(alpha + 1.0) * math.sin(angle) + 0.5 * math.pi * math.cos(angle))
        / math.pi
    )


def power_log_integral(start: float, exponent: float, coeffs: list[float]) -> float:
    """Integrate (c0 + c1 log y + c2 log(y)**2) y**(-exponent) over [start, inf).

    Raises:
        DomainError: If the integral diverges (exponent <= 1) or start <= 0.
    """
    if exponent <= 1.0 or start <= 0.0:
        msg = f"divergent tail integral: exponent={exponent!r} start={start!r}"
        raise DomainError(msg)
    e = exponent - 1.0
    log_start = math.log(start)
    # int_X^inf y^-(e+1) log(y)^m dy = X^-e * sum_k m!/(m-k)! L^(m-k) / e^(k+1)
    basis = [
        1.0 / e,
        log_start / e + 1.0 / e**2,
        log_start**2 / e + 2.0 * log_start / e**2 + 2.0 / e**3,
    ]
    if len(coeffs) > len(basis):
        msg = "only powers of log(y) up to 2 are supported"
        raise ValueError(msg)
    return start ** (-e) * sum(c * b for c, b in zip(coeffs, basis))
