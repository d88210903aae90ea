"""Characteristic function inversion for the density and its derivatives.

With theta(t) = t x + zeta (t**alpha - t) every quantity below is a real
integral over t in [0, inf) against the envelope exp(-t**alpha):

    f       = 1/pi  int e cos(theta)
    f'      = -1/pi int t e sin(theta)
    df/dalpha = 1/pi int e (a cos(theta) + b sin(theta))
    df/dbeta  = tan(pi alpha/2)/pi int e (t**alpha - t) sin(theta)

The integrals are truncated where the envelope drops below 1e-18 and the
neglected mass is added to the error estimate.
"""

from __future__ import annotations

import cmath
import logging
import math
import typing as t
from dataclasses import dataclass

from stable_fisher.params import ALPHA_MAX, check_shape, derive_shape
from stable_fisher.quadrature import (
    DEFAULT_CONFIG,
    QuadConfig,
    QuadResult,
    integrate,
    integrate_oscillatory,
)
from stable_fisher.results import DensityMethod, DensityResult

logger = logging.getLogger(__name__)

TRUNCATION_LEVEL = 1e-18
OSCILLATORY_CUTOFF = 10.0
NEGATIVE_TOLERANCE = 1e-12

Amplitude = t.Callable[[float], float]


@dataclass(frozen=True)
class CharacteristicEvaluation:
    """The characteristic function at one t, with its modulus."""

    t: float
    value: complex
    decay_envelope: float


def cf(t_: float, alpha: float, beta: float) -> complex:
    """Evaluate the standard characteristic function.

    log cf(t) = -|t|**alpha - i beta sgn(t) tan(pi alpha/2) (|t| - |t|**alpha)
    """
    check_shape(alpha, beta)
    abs_t = abs(t_)
    if abs_t == 0.0:
        return complex(1.0, 0.0)
    envelope = abs_t**alpha
    if alpha == ALPHA_MAX:
        return complex(math.exp(-envelope), 0.0)
    phase = beta * math.copysign(1.0, t_) * math.tan(0.5 * math.pi * alpha)
    phase *= abs_t - envelope
    return cmath.exp(complex(-envelope, -phase))


def characteristic(t_: float, alpha: float, beta: float) -> CharacteristicEvaluation:
    """Evaluate the characteristic function and its decay envelope."""
    return CharacteristicEvaluation(
        t=t_, value=cf(t_, alpha, beta), decay_envelope=math.exp(-(abs(t_) ** alpha))
    )


def truncation_point(alpha: float) -> float:
    """Return T with exp(-T**alpha) = TRUNCATION_LEVEL."""
    return (-math.log(TRUNCATION_LEVEL)) ** (1.0 / alpha)


def _tail_bound(upper: float, alpha: float, power: float) -> float:
    """Bound int_T^inf t**power exp(-t**alpha) dt for the truncation point T."""
    slope = max(alpha * upper ** (alpha - 1.0) - power / upper, 1.0)
    return upper**power * math.exp(-(upper**alpha)) / slope


def _invert(
    x: float,
    alpha: float,
    beta: float,
    amp_cos: Amplitude | None,
    amp_sin: Amplitude | None,
    power: float,
    cfg: QuadConfig,
) -> QuadResult:
    """Return (1/pi) int_0^T exp(-t**alpha) (c(t) cos theta + s(t) sin theta) dt."""
    zeta = derive_shape(alpha, beta).zeta
    upper = truncation_point(alpha)

    def psi(t_: float) -> float:
        return zeta * (t_**alpha - t_)

    def c_of(t_: float) -> float:
        return amp_cos(t_) if amp_cos is not None else 0.0

    def s_of(t_: float) -> float:
        return amp_sin(t_) if amp_sin is not None else 0.0

    if abs(x) <= OSCILLATORY_CUTOFF:

        def direct(t_: float) -> float:
            theta = t_ * x + psi(t_)
            return math.exp(-(t_**alpha)) * (
                c_of(t_) * math.cos(theta) + s_of(t_) * math.sin(theta)
            )

        result = integrate(direct, 0.0, upper, cfg)
    else:
        # c cos(tx + psi) + s sin(tx + psi)
        #   = cos(tx) (c cos psi + s sin psi) + sin(tx) (s cos psi - c sin psi)
        omega = abs(x)
        sign = math.copysign(1.0, x)

        def cos_part(t_: float) -> float:
            p = psi(t_)
            return math.exp(-(t_**alpha)) * (
                c_of(t_) * math.cos(p) + s_of(t_) * math.sin(p)
            )

        def sin_part(t_: float) -> float:
            p = psi(t_)
            return (
                sign
                * math.exp(-(t_**alpha))
                * (s_of(t_) * math.cos(p) - c_of(t_) * math.sin(p))
            )

        result = QuadResult.combine(
            [
                integrate_oscillatory(cos_part, 0.0, upper, omega, "cos", cfg),
                integrate_oscillatory(sin_part, 0.0, upper, omega, "sin", cfg),
            ]
        )
    return result.scaled(1.0 / math.pi).plus_error(
        _tail_bound(upper, alpha, power) / math.pi
    )


def _one(_: float) -> float:
    return 1.0


def _t_log_t_power(alpha: float) -> Amplitude:
    def amp(t_: float) -> float:
        if t_ <= 0.0:
            return 0.0
        return t_**alpha * math.log(t_)

    return amp


def density_fourier(
    x: float, alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> DensityResult:
    """Standard density by inversion of the characteristic function.

    Small negative values produced by cancellation are clipped to 0.

    Raises:
        NonConvergenceError: If the inversion integral misses its tolerance.
    """
    check_shape(alpha, beta)
    result = _invert(x, alpha, beta, _one, None, 0.0, cfg)
    value = result.value
    if value < 0.0:
        if value < -NEGATIVE_TOLERANCE:
            logger.warning(
                "inversion gave f(%s; %s, %s) = %s < 0, clipping", x, alpha, beta, value
            )
        value = 0.0
    return DensityResult(
        value=value,
        abs_error=result.abs_error,
        method=DensityMethod.FOURIER_FALLBACK,
        converged=result.converged,
        n_evals=result.n_evals,
    )


def density_deriv_fourier(
    x: float, alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> DensityResult:
    """Spatial derivative f'(x) by inversion; regular at x = zeta."""
    check_shape(alpha, beta)
    result = _invert(x, alpha, beta, None, lambda t_: -t_, 1.0, cfg)
    return DensityResult(
        value=result.value,
        abs_error=result.abs_error,
        method=DensityMethod.FOURIER_FALLBACK,
        converged=result.converged,
        n_evals=result.n_evals,
    )


def f_alpha(
    x: float, alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> QuadResult:
    """Derivative of the standard density with respect to alpha.

    At alpha = 2 the value is the left-sided derivative, the formula's limit.

    Returns:
        The derivative with the error estimate and convergence flag of the
        inversion integral.
    """
    check_shape(alpha, beta)
    if alpha == ALPHA_MAX:
        logger.debug("f_alpha at alpha=2 is one-sided (alpha -> 2 from below)")
        tan_half = 0.0
        sec_sq = 1.0
    else:
        tan_half = math.tan(0.5 * math.pi * alpha)
        sec_sq = 1.0 / math.cos(0.5 * math.pi * alpha) ** 2
    t_log_t = _t_log_t_power(alpha)

    def amp_cos(t_: float) -> float:
        return -t_log_t(t_)

    def amp_sin(t_: float) -> float:
        return beta * (
            tan_half * t_log_t(t_) + 0.5 * math.pi * sec_sq * (t_**alpha - t_)
        )

    return _invert(x, alpha, beta, amp_cos, amp_sin, alpha + 1.0, cfg)


def f_beta(
    x: float, alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> QuadResult:
    """Derivative of the standard density with respect to beta; 0 at alpha = 2."""
    check_shape(alpha, beta)
    if alpha == ALPHA_MAX:
        return QuadResult(0.0, 0.0, 0, converged=True)
    tan_half = math.tan(0.5 * math.pi * alpha)

    def amp_sin(t_: float) -> float:
        return tan_half * (t_**alpha - t_)

    return _invert(x, alpha, beta, None, amp_sin, alpha, cfg)
