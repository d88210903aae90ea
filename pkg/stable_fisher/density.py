"""Stable density and its spatial derivative from the integral representation.

For y = x - zeta > 0 and z = y ** (alpha / (alpha - 1)),

    f(x) = alpha y**(1/(alpha-1)) / (2 (alpha-1)) * int_{-varrho}^{1} A exp(-z A) dphi

and for y < 0 the reflection f(x; alpha, beta) = f(-x; alpha, -beta) applies.
Points within NEAR_MODE_THRESHOLD of zeta are handed to the Fourier backend.
"""

from __future__ import annotations

import logging
import math
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from scipy import optimize
from scipy import special

from stable_fisher import fourier
from stable_fisher.exceptions import SingularPointError
from stable_fisher.integrand import log_A_near_end, lower_endpoint
from stable_fisher.params import (
    ALPHA_MAX,
    StableParams,
    check_shape,
    derive_shape,
    standardize,
)
from stable_fisher.quadrature import (
    DEFAULT_CONFIG,
    PowerLaw,
    QuadConfig,
    QuadResult,
    integrate,
    integrate_semi_infinite,
)
from stable_fisher.results import DensityMethod, DensityResult

if t.TYPE_CHECKING:
    from collections.abc import Sequence

__all__ = [
    "DensityMethod",
    "DensityResult",
    "density",
    "density_deriv",
    "density_deriv_std",
    "density_grid",
    "density_std",
    "gaussian_density",
    "mode_value",
    "normalization",
]

logger = logging.getLogger(__name__)

NEAR_MODE_THRESHOLD = 0.05
INV_TWO_SQRT_PI = 0.5 / math.sqrt(math.pi)
# exp() of anything below this underflows to zero in double precision.
LOG_UNDERFLOW = -745.0
_BRACKET = 1e-12
# log(1 - phi) below which the kernel is negligible against its peak
_LOWER_SPAN = 50.0
S_FLOOR = -690.0


def gaussian_density(x: float) -> float:
    """Density of N(0, 2), the alpha = 2 member of the family."""
    return INV_TWO_SQRT_PI * math.exp(-0.25 * x * x)


def _exact_gaussian(value: float) -> DensityResult:
    return DensityResult(value=value, abs_error=0.0, method=DensityMethod.GAUSSIAN_EXACT)


def _peak(alpha: float, beta: float, shift: float, s_max: float) -> float | None:
    """Locate s = log(1 - phi) where log A + shift = 0, next to the kernel maximum."""

    def excess(s: float) -> float:
        return log_A_near_end(math.exp(s), alpha, beta) + shift

    a, b = S_FLOOR, s_max + math.log1p(-_BRACKET)
    try:
        f_a, f_b = excess(a), excess(b)
        if not (math.isfinite(f_a) and math.isfinite(f_b)) or f_a * f_b > 0:
            return None
        return float(optimize.brentq(excess, a, b, xtol=1e-12))
    except (ValueError, RuntimeError):
        return None


def _kernel_integrals(
    y: float, alpha: float, beta: float, cfg: QuadConfig, power: int
) -> QuadResult:
    """Integrate A**power exp(-z A) over (-varrho, 1) for y > 0.

    The integral runs over s = log(1 - phi). For large y the mass lies within
    about delta * y**-alpha of phi = 1, where a mesh in phi cannot see it.
    """
    delta = ALPHA_MAX - alpha
    log_z = alpha / (alpha - 1.0) * math.log(y)
    z = math.exp(log_z)
    s_max = math.log(1.0 - lower_endpoint(alpha, beta))

    def kernel(s: float) -> float:
        la = log_A_near_end(math.exp(s), alpha, beta)
        if not math.isfinite(la):
            return 0.0
        exponent = s + power * la - z * math.exp(min(la, 700.0))
        if exponent < LOG_UNDERFLOW:
            return 0.0
        return math.exp(exponent)

    peak = _peak(alpha, beta, log_z - math.log(power), s_max)
    centre = peak if peak is not None else s_max - 1.0
    s_min = max(centre - _LOWER_SPAN, S_FLOOR)
    points = [centre]
    if delta > 0.0:
        points.extend([math.log(delta), math.log(10.0 * delta)])
    height = kernel(centre)
    # the integral is at least of the order of the peak height
    inner_cfg = replace(cfg, abs_tol=max(1e-2 * cfg.rel_tol * height, 1e-300))
    result = integrate(
        kernel, s_min, s_max, inner_cfg, points=[p for p in points if s_min < p < s_max]
    )
    # below s_min the kernel is bounded by exp(power + s - centre) times its peak
    return result.plus_error(height * math.exp(power - _LOWER_SPAN))


def _nolan_density(y: float, alpha: float, beta: float, cfg: QuadConfig) -> DensityResult:
    r = 1.0 / (alpha - 1.0)
    prefactor = 0.5 * alpha * r * y**r
    integral = _kernel_integrals(y, alpha, beta, cfg, power=1)
    result = integral.scaled(prefactor)
    return DensityResult(
        value=result.value,
        abs_error=result.abs_error,
        method=DensityMethod.NOLAN_INTEGRAL,
        converged=result.converged,
        n_evals=result.n_evals,
    )


def density_std(
    x: float, alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> DensityResult:
    """Standard density f(x; alpha, beta) at (mu, sigma) = (0, 1).

    Raises:
        InvalidParameterError: If (alpha, beta) is out of range.
        NonConvergenceError: If quadrature misses its tolerance in strict mode.
    """
    check_shape(alpha, beta)
    if alpha == ALPHA_MAX:
        return _exact_gaussian(gaussian_density(x))
    y = x - derive_shape(alpha, beta).zeta
    if abs(y) <= NEAR_MODE_THRESHOLD:
        return fourier.density_fourier(x, alpha, beta, cfg)
    if y < 0:
        return density_std(-x, alpha, -beta, cfg)
    return _nolan_density(y, alpha, beta, cfg)


def density_deriv_std(
    x: float, alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> DensityResult:
    """Spatial derivative f'(x; alpha, beta) of the standard density.

    Raises:
        SingularPointError: At x = zeta, where the representation degenerates.
        NonConvergenceError: If quadrature misses its tolerance in strict mode.
    """
    check_shape(alpha, beta)
    if alpha == ALPHA_MAX:
        return _exact_gaussian(-0.5 * x * gaussian_density(x))
    y = x - derive_shape(alpha, beta).zeta
    if y == 0.0:
        msg = f"the derivative representation is singular at x = zeta = {x!r}"
        raise SingularPointError(msg)
    if abs(y) <= NEAR_MODE_THRESHOLD:
        return fourier.density_deriv_fourier(x, alpha, beta, cfg)
    if y < 0:
        return density_deriv_std(-x, alpha, -beta, cfg).negated()

    am1 = alpha - 1.0
    f = _nolan_density(y, alpha, beta, cfg)
    second = _kernel_integrals(y, alpha, beta, cfg, power=2)
    coeff = alpha * alpha / (2.0 * am1 * am1) * y ** (2.0 / am1)
    value = f.value / (am1 * y) - coeff * second.value
    abs_error = f.abs_error / (am1 * y) + coeff * second.abs_error
    return DensityResult(
        value=value,
        abs_error=abs_error,
        method=DensityMethod.NOLAN_INTEGRAL,
        converged=f.converged and second.converged,
        n_evals=f.n_evals + second.n_evals,
    )


def density(x: float, p: StableParams, cfg: QuadConfig = DEFAULT_CONFIG) -> DensityResult:
    """Density at x for general location and scale."""
    x_std, scale = standardize(x, p)
    return density_std(x_std, p.alpha, p.beta, cfg).scaled(scale)


def density_deriv(
    x: float, p: StableParams, cfg: QuadConfig = DEFAULT_CONFIG
) -> DensityResult:
    """Spatial derivative of the density for general location and scale."""
    x_std, scale = standardize(x, p)
    return density_deriv_std(x_std, p.alpha, p.beta, cfg).scaled(scale * scale)


def density_grid(
    xs: Sequence[float],
    p: StableParams,
    cfg: QuadConfig = DEFAULT_CONFIG,
    threads: int = 1,
) -> list[DensityResult]:
    """Evaluate the density on a grid, in grid order."""
    if threads <= 1:
        return [density(x, p, cfg) for x in xs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda x: density(x, p, cfg), xs))


def mode_value(alpha: float, beta: float) -> float:
    """Closed form of the standard density at x = zeta.

    f(zeta) = Gamma(1 + 1/alpha) cos(arctan(zeta) / alpha)
              / (pi (1 + zeta**2) ** (1 / (2 alpha)))
    """
    zeta = derive_shape(alpha, beta).zeta
    return float(
        special.gamma(1.0 + 1.0 / alpha)
        * math.cos(math.atan(zeta) / alpha)
        / (math.pi * (1.0 + zeta * zeta) ** (0.5 / alpha))
    )


def normalization(
    alpha: float, beta: float, cfg: QuadConfig = DEFAULT_CONFIG
) -> QuadResult:
    """Integrate the standard density over the real line.

    Each half line around zeta is mapped onto (0, 1] by the power-law
    substitution matched to the x**(-1-alpha) tail.
    """
    check_shape(alpha, beta)
    zeta = derive_shape(alpha, beta).zeta
    hint = PowerLaw(alpha + 1.0)
    right = integrate_semi_infinite(
        lambda u: density_std(zeta + u, alpha, beta, cfg).value, 0.0, hint, cfg
    )
    left = integrate_semi_infinite(
        lambda u: density_std(zeta - u, alpha, beta, cfg).value, 0.0, hint, cfg
    )
    return QuadResult.combine([left, right])
