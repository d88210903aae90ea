"""Adaptive integration engine shared by every numeric module.

Finite intervals go through QUADPACK's adaptive Gauss-Kronrod driver
(``scipy.integrate.quad``), optionally after an endpoint-smoothing
substitution. Semi-infinite intervals are either handed to the infinite-range
driver (exponential decay) or mapped onto (0, 1] by a substitution that turns
a pure power law into a constant (power-law decay).
"""

from __future__ import annotations

import enum
import logging
import math
import typing as t
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate as sp_integrate

from stable_fisher.exceptions import NonConvergenceError

if t.TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

logger = logging.getLogger(__name__)

# tanh-sinh nodes beyond |s| = 4 map to the endpoints in double precision.
_DE_HALF_WIDTH = 4.0


class EndpointTransform(str, enum.Enum):
    """Substitution applied before adaptive integration on a finite interval."""

    NONE = "none"
    ALGEBRAIC_SINGULARITY = "algebraic_singularity"
    DOUBLE_EXPONENTIAL = "double_exponential"


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and budgets for one integrator call."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    endpoint_transform: EndpointTransform = EndpointTransform.NONE
    max_evaluations: int | None = None
    strict: bool = True

    def __post_init__(self) -> None:
        """Reject non-positive tolerances."""
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            msg = "abs_tol and rel_tol must be positive"
            raise ValueError(msg)
        if self.max_subdivisions < 1:
            msg = "max_subdivisions must be at least 1"
            raise ValueError(msg)

    def with_transform(self, transform: EndpointTransform) -> QuadConfig:
        """Return a copy using another endpoint transform."""
        return replace(self, endpoint_transform=transform)

    def tolerance_for(self, value: float) -> float:
        """Return the error bound requested for a result of size ``value``."""
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_CONFIG = QuadConfig()


@dataclass(frozen=True)
class QuadResult:
    """Value, error estimate, evaluation count and convergence flag."""

    value: float
    abs_error: float
    n_evals: int
    converged: bool

    @classmethod
    def combine(cls, parts: Iterable[QuadResult]) -> QuadResult:
        """Sum the results of integrating adjacent segments."""
        value = 0.0
        abs_error = 0.0
        n_evals = 0
        converged = True
        for part in parts:
            value += part.value
            abs_error += part.abs_error
            n_evals += part.n_evals
            converged = converged and part.converged
        return cls(value, abs_error, n_evals, converged)

    def scaled(self, factor: float) -> QuadResult:
        """Multiply value and error by a constant."""
        return QuadResult(
            self.value * factor,
            self.abs_error * abs(factor),
            self.n_evals,
            self.converged,
        )

    def plus_error(self, extra: float) -> QuadResult:
        """Return a copy with ``extra`` added to the error estimate."""
        return replace(self, abs_error=self.abs_error + abs(extra))


@dataclass(frozen=True)
class Exponential:
    """Integrand decays at least exponentially."""


@dataclass(frozen=True)
class PowerLaw:
    """Integrand decays like x**(-exponent) with exponent > 1."""

    exponent: float

    def __post_init__(self) -> None:
        """Reject non-integrable power laws."""
        if not self.exponent > 1:
            msg = f"power-law exponent must exceed 1, got {self.exponent!r}"
            raise ValueError(msg)


DecayHint = t.Union[Exponential, PowerLaw]


class _BudgetExceededError(Exception):
    pass


class _CountingIntegrand:
    """Wrap an integrand, counting calls and enforcing the evaluation budget."""

    def __init__(self, f: t.Callable[[float], float], budget: int | None) -> None:
        self.f = f
        self.budget = budget
        self.calls = 0

    def __call__(self, x: float) -> float:
        self.calls += 1
        if self.budget is not None and self.calls > self.budget:
            raise _BudgetExceededError
        return self.f(x)


def _run_quad(
    f: t.Callable[[float], float],
    a: float,
    b: float,
    cfg: QuadConfig,
    points: Sequence[float] | None = None,
) -> QuadResult:
    counter = _CountingIntegrand(f, cfg.max_evaluations)
    kwargs: dict[str, t.Any] = {
        "epsabs": cfg.abs_tol,
        "epsrel": cfg.rel_tol,
        "limit": cfg.max_subdivisions,
        "full_output": 1,
    }
    if points:
        inside = sorted(p for p in points if a < p < b)
        if inside:
            kwargs["points"] = inside
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
            out = sp_integrate.quad(counter, a, b, **kwargs)
    except _BudgetExceededError:
        msg = (
            f"evaluation budget of {cfg.max_evaluations} exhausted on [{a}, {b}]"
        )
        if cfg.strict:
            raise NonConvergenceError(msg, math.nan, math.inf) from None
        logger.warning(msg)
        return QuadResult(math.nan, math.inf, counter.calls, converged=False)

    value, abs_error, info = float(out[0]), float(out[1]), out[2]
    ier_ok = len(out) == 3  # quad appends a message only when ier > 0
    converged = bool(
        ier_ok and math.isfinite(value) and abs_error <= cfg.tolerance_for(value)
    )
    result = QuadResult(value, abs_error, int(info["neval"]), converged)
    if not converged:
        _report_failure(result, a, b, cfg, out[3] if len(out) > 3 else "")
    return result


def _report_failure(
    result: QuadResult, a: float, b: float, cfg: QuadConfig, detail: str
) -> None:
    msg = (
        f"quadrature on [{a}, {b}] did not converge: value={result.value!r} "
        f"abs_error={result.abs_error!r}"
    )
    if cfg.strict:
        raise NonConvergenceError(msg, result.value, result.abs_error)
    logger.warning("%s (%s)", msg, str(detail).splitlines()[0] if detail else "")


def _smooth_endpoints(
    f: t.Callable[[float], float], a: float, b: float
) -> t.Callable[[float], float]:
    """Substitute x = a + (b - a)(3u^2 - 2u^3), flattening both endpoints."""
    width = b - a

    def mapped(u: float) -> float:
        x = a + width * u * u * (3.0 - 2.0 * u)
        if x <= a or x >= b:
            return 0.0
        return f(x) * 6.0 * width * u * (1.0 - u)

    return mapped


def _tanh_sinh(
    f: t.Callable[[float], float], a: float, b: float
) -> t.Callable[[float], float]:
    """Double-exponential substitution of (a, b) onto (-4, 4)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)

    def mapped(s: float) -> float:
        inner = 0.5 * math.pi * math.sinh(s)
        x = mid + half * math.tanh(inner)
        if x <= a or x >= b:
            return 0.0
        jac = half * 0.5 * math.pi * math.cosh(s) / math.cosh(inner) ** 2
        if jac == 0.0:
            return 0.0
        return f(x) * jac

    return mapped


def integrate(
    f: t.Callable[[float], float],
    a: float,
    b: float,
    cfg: QuadConfig = DEFAULT_CONFIG,
    points: Sequence[float] | None = None,
) -> QuadResult:
    """Integrate ``f`` over the finite interval [a, b].

    Args:
        f: Integrand, evaluated only on the open interval.
        a: Lower limit.
        b: Upper limit, must exceed ``a``.
        cfg: Tolerances, budget and endpoint transform.
        points: Interior break points (ignored under an endpoint transform).

    Returns:
        The integral with its error estimate.

    Raises:
        ValueError: If ``a >= b``.
        NonConvergenceError: If tolerances are missed and ``cfg.strict`` is set.
    """
    if not a < b:
        msg = f"integration limits must satisfy a < b, got a={a!r} b={b!r}"
        raise ValueError(msg)
    transform = cfg.endpoint_transform
    if transform is EndpointTransform.ALGEBRAIC_SINGULARITY:
        return _run_quad(_smooth_endpoints(f, a, b), 0.0, 1.0, cfg)
    if transform is EndpointTransform.DOUBLE_EXPONENTIAL:
        return _run_quad(_tanh_sinh(f, a, b), -_DE_HALF_WIDTH, _DE_HALF_WIDTH, cfg)
    return _run_quad(f, a, b, cfg, points)


def integrate_semi_infinite(
    f: t.Callable[[float], float],
    a: float,
    decay_hint: DecayHint,
    cfg: QuadConfig = DEFAULT_CONFIG,
) -> QuadResult:
    """Integrate ``f`` over [a, inf).

    Exponential decay uses QUADPACK's infinite-range driver. For a power law
    x**(-p) the substitution x - a + c = c * u**(-1/(p-1)) with c = max(|a|, 1)
    maps [a, inf) onto (0, 1] and turns a pure power law into a constant.
    """
    if isinstance(decay_hint, PowerLaw):
        p = decay_hint.exponent
        c = max(abs(a), 1.0)
        k = 1.0 / (p - 1.0)

        def mapped(u: float) -> float:
            if u <= 0.0:
                return 0.0
            r = u ** (-k)
            x = a + c * (r - 1.0)
            if not math.isfinite(x):
                return 0.0
            return f(x) * c * k * r / u

        return _run_quad(mapped, 0.0, 1.0, cfg)
    return _run_quad(f, a, math.inf, cfg)


def integrate_oscillatory(
    f: t.Callable[[float], float],
    a: float,
    b: float,
    omega: float,
    kind: t.Literal["cos", "sin"],
    cfg: QuadConfig = DEFAULT_CONFIG,
) -> QuadResult:
    """Integrate ``f(x) * cos(omega x)`` (or sin) over a finite interval.

    Uses QUADPACK's Clenshaw-Curtis rule with modified moments, which stays
    accurate when the weight completes many periods on [a, b].
    """
    if not a < b:
        msg = f"integration limits must satisfy a < b, got a={a!r} b={b!r}"
        raise ValueError(msg)
    counter = _CountingIntegrand(f, cfg.max_evaluations)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
            out = sp_integrate.quad(
                counter,
                a,
                b,
                weight=kind,
                wvar=omega,
                epsabs=cfg.abs_tol,
                epsrel=cfg.rel_tol,
                limit=cfg.max_subdivisions,
                full_output=1,
            )
    except _BudgetExceededError:
        msg = f"evaluation budget of {cfg.max_evaluations} exhausted on [{a}, {b}]"
        if cfg.strict:
            raise NonConvergenceError(msg, math.nan, math.inf) from None
        logger.warning(msg)
        return QuadResult(math.nan, math.inf, counter.calls, converged=False)
    value, abs_error = float(out[0]), float(out[1])
    converged = bool(
        len(out) == 3
        and math.isfinite(value)
        and abs_error <= cfg.tolerance_for(value)
    )
    result = QuadResult(value, abs_error, counter.calls, converged)
    if not converged:
        _report_failure(result, a, b, cfg, out[3] if len(out) > 3 else "")
    return result


def integrate_vec(
    f: t.Callable[[float], np.ndarray],
    a: float,
    b: float,
    cfg: QuadConfig = DEFAULT_CONFIG,
    points: Sequence[float] | None = None,
) -> tuple[np.ndarray, float, int, bool]:
    """Integrate a vector-valued integrand with ``scipy.integrate.quad_vec``.

    Returns:
        ``(values, abs_error, n_evals, converged)``; the error estimate is the
        max-norm bound reported by the driver.
    """
    inside = None
    if points and math.isfinite(b):
        inside = sorted(p for p in points if a < p < b) or None
    values, abs_error, info = sp_integrate.quad_vec(
        f,
        a,
        b,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        norm="max",
        limit=cfg.max_subdivisions,
        points=inside,
        full_output=True,
    )
    converged = bool(info.success)
    if not converged:
        msg = f"vector quadrature on [{a}, {b}] did not converge: {info.message}"
        if cfg.strict:
            raise NonConvergenceError(msg, float(np.max(np.abs(values))), abs_error)
        logger.warning(msg)
    return np.asarray(values, dtype=float), float(abs_error), int(info.neval), converged


def fd_derivative(
    f: t.Callable[[float], float], x: float, h: float = 1e-3
) -> float:
    """Richardson-extrapolated central difference of ``f`` at ``x``.

    Combines the steps ``h`` and ``h / 2`` so the truncation error is O(h**4).
    """
    coarse = (f(x + h) - f(x - h)) / (2.0 * h)
    half = 0.5 * h
    fine = (f(x + half) - f(x - half)) / h
    return (4.0 * fine - coarse) / 3.0


def fd_second_derivative(
    f: t.Callable[[float], float], x: float, h: float = 1e-3
) -> float:
    """Richardson-extrapolated second central difference of ``f`` at ``x``."""
    f0 = f(x)
    coarse = (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h)
    half = 0.5 * h
    fine = (f(x + half) - 2.0 * f0 + f(x - half)) / (half * half)
    return (4.0 * fine - coarse) / 3.0
