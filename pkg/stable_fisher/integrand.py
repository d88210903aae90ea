"""The positive integrand A(phi; alpha, beta) of the density representation.

A is evaluated from the trigonometric factors

    B = sin(pi/2 (alpha phi + a))       C = cos(pi/2 ((alpha - 1) phi + a))
    D = cos(pi phi / 2)                 E = cos(pi a / 2)

with ``a = alpha * varrho`` as

    A = (C / B) * (D E / B) ** (1 / (alpha - 1)),

summed in log space so the large exponent near alpha = 2 never overflows.
The near-endpoint expansions substitute ``a = -beta * delta``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

from stable_fisher.exceptions import DomainError, RegimeMismatchError
from stable_fisher.params import ALPHA_MAX, check_shape, derive_shape

logger = logging.getLogger(__name__)

ENDPOINT_MARGIN = 1e-12
HALF_PI = 0.5 * math.pi


def alpha_varrho(alpha: float, beta: float) -> float:
    """Return alpha * varrho = (2 / pi) arctan(beta tan(pi alpha / 2))."""
    return alpha * derive_shape(alpha, beta).varrho


def lower_endpoint(alpha: float, beta: float) -> float:
    """Return -varrho, the lower limit of the phi integral for x > zeta."""
    return -derive_shape(alpha, beta).varrho


@dataclass(frozen=True)
class IntegrandFactors:
    """Trigonometric factors of A at one phi."""

    B: float
    C: float
    D: float
    E: float
    F: float
    G: float
    H: float

    @classmethod
    def at(
        cls, phi: float, alpha: float, beta: float, *, expanded: bool = False
    ) -> IntegrandFactors:
        """Evaluate the factors.

        Args:
            phi: Integration variable.
            alpha: Characteristic exponent.
            beta: Skewness.
            expanded: Use ``-beta * delta`` in place of ``alpha * varrho``.

        Returns:
            The factors; F, G and H are the companions cos, sin and sin of the
            B, C and D arguments.
        """
        a = -beta * (ALPHA_MAX - alpha) if expanded else alpha_varrho(alpha, beta)
        arg_b = HALF_PI * (alpha * phi + a)
        arg_c = HALF_PI * ((alpha - 1.0) * phi + a)
        arg_d = HALF_PI * phi
        return cls(
            B=math.sin(arg_b),
            C=math.cos(arg_c),
            D=math.cos(arg_d),
            E=math.cos(HALF_PI * a),
            F=math.cos(arg_b),
            G=math.sin(arg_c),
            H=math.sin(arg_d),
        )

    @classmethod
    def near_end(cls, lam: float, alpha: float, beta: float) -> IntegrandFactors:
        """Evaluate the factors at phi = 1 - lam from lam itself.

        Every argument is written as a distance from its zero so that lam far
        below the spacing of doubles next to 1 keeps full relative precision.
        """
        a = alpha_varrho(alpha, beta)
        # pi - arg_b
        gap_b = HALF_PI * ((ALPHA_MAX - alpha - a) + alpha * lam)
        arg_c = HALF_PI * ((alpha - 1.0) * (1.0 - lam) + a)
        arg_end = HALF_PI * lam
        return cls(
            B=math.sin(gap_b),
            C=math.cos(arg_c),
            D=math.sin(arg_end),
            E=math.cos(HALF_PI * a),
            F=-math.cos(gap_b),
            G=math.sin(arg_c),
            H=math.cos(arg_end),
        )

    def log_A(self, alpha: float) -> float:
        """Return log A from the factors; -inf at phi = 1, +inf at the lower end."""
        if self.D <= 0.0 or self.C <= 0.0:
            return -math.inf
        if self.B <= 0.0:
            return math.inf
        r = 1.0 / (alpha - 1.0)
        log_b = math.log(self.B)
        return (
            math.log(self.C) - log_b + r * (math.log(self.D) + math.log(self.E) - log_b)
        )


def log_A(phi: float, alpha: float, beta: float) -> float:
    """Return log A(phi) without any domain check."""
    if alpha == ALPHA_MAX:
        s = math.sin(HALF_PI * phi)
        if s <= 0.0:
            return math.inf
        return -math.log(4.0) - 2.0 * math.log(s)
    return IntegrandFactors.at(phi, alpha, beta).log_A(alpha)


def log_A_near_end(lam: float, alpha: float, beta: float) -> float:
    """Return log A(1 - lam), accurate down to lam of order 1e-300."""
    if lam >= 0.5:
        return log_A(1.0 - lam, alpha, beta)
    if alpha == ALPHA_MAX:
        return -math.log(4.0) - 2.0 * math.log(math.cos(HALF_PI * lam))
    return IntegrandFactors.near_end(lam, alpha, beta).log_A(alpha)


def _check_domain(phi: float, alpha: float, beta: float) -> None:
    check_shape(alpha, beta)
    lo = lower_endpoint(alpha, beta)
    if not (lo + ENDPOINT_MARGIN < phi < 1.0 - ENDPOINT_MARGIN):
        msg = f"phi={phi!r} outside the open interval ({lo!r}, 1)"
        raise DomainError(msg)


def A(phi: float, alpha: float, beta: float) -> float:
    """Evaluate A(phi; alpha, beta) > 0.

    Raises:
        DomainError: If phi is not strictly inside (-varrho, 1).
    """
    _check_domain(phi, alpha, beta)
    if alpha == ALPHA_MAX:
        return 1.0 / (4.0 * math.sin(HALF_PI * phi) ** 2)
    return math.exp(log_A(phi, alpha, beta))


def _angles(phi: float, alpha: float, beta: float) -> tuple[float, float, float]:
    a = 0.0 if alpha == ALPHA_MAX else alpha_varrho(alpha, beta)
    return (
        HALF_PI * (alpha * phi + a),
        HALF_PI * ((alpha - 1.0) * phi + a),
        HALF_PI * phi,
    )


def log_A_prime(phi: float, alpha: float, beta: float) -> float:
    """Return A'/A, the phi-derivative of log A."""
    arg_b, arg_c, arg_d = _angles(phi, alpha, beta)
    am1 = alpha - 1.0
    return -HALF_PI * (
        am1 * math.tan(arg_c)
        + alpha * alpha / am1 / math.tan(arg_b)
        + math.tan(arg_d) / am1
    )


def _log_A_second(phi: float, alpha: float, beta: float) -> float:
    arg_b, arg_c, arg_d = _angles(phi, alpha, beta)
    am1 = alpha - 1.0
    return (math.pi**2 / 4.0) * (
        alpha**3 / am1 / math.sin(arg_b) ** 2
        - am1 * am1 / math.cos(arg_c) ** 2
        - 1.0 / am1 / math.cos(arg_d) ** 2
    )


def A_prime(phi: float, alpha: float, beta: float) -> float:
    """Evaluate dA/dphi as A times the derivative of log A."""
    return A(phi, alpha, beta) * log_A_prime(phi, alpha, beta)


def A_second(phi: float, alpha: float, beta: float) -> float:
    """Evaluate d2A/dphi2 = A' (log A)' + A (log A)''."""
    value = A(phi, alpha, beta)
    first = log_A_prime(phi, alpha, beta)
    return value * (first * first + _log_A_second(phi, alpha, beta))


class Scale(str, enum.Enum):
    """Distance of phi = 1 - lambda from the upper endpoint, relative to delta."""

    INNER = "inner"
    MID = "mid"
    OUTER = "outer"


def mid_point_lambda(delta: float, epsilon: float = 0.1) -> float:
    """Return lambda = delta ** (1/2 - epsilon) for the point 1 - lambda."""
    if not 0.0 < epsilon < 0.5:
        msg = f"epsilon must lie in (0, 1/2), got {epsilon!r}"
        raise ValueError(msg)
    return delta ** (0.5 - epsilon)


def _check_expansion(
    lam: float, delta: float, regime: Scale, epsilon: float, eps_prime: float
) -> None:
    if not 0.0 < delta < 1.0:
        msg = f"expansions need 0 < delta < 1, got {delta!r}"
        raise RegimeMismatchError(msg)
    if lam < 0.0 or lam >= 1.0:
        msg = f"lambda must lie in [0, 1), got {lam!r}"
        raise RegimeMismatchError(msg)
    inner_edge = delta / eps_prime
    if regime is Scale.INNER and lam > inner_edge:
        msg = f"inner scale needs lambda <= delta/eps' = {inner_edge!r}, got {lam!r}"
        raise RegimeMismatchError(msg)
    if regime is Scale.MID and not (
        inner_edge < lam <= mid_point_lambda(delta, epsilon) * (1 + 1e-12)
    ):
        msg = (
            f"mid scale needs delta/eps' < lambda <= delta**(1/2 - eps), got {lam!r}"
        )
        raise RegimeMismatchError(msg)
    if regime is Scale.OUTER and lam <= inner_edge:
        msg = f"outer scale needs lambda > delta/eps' = {inner_edge!r}, got {lam!r}"
        raise RegimeMismatchError(msg)


def A_expansion(
    lam: float,
    delta: float,
    beta: float,
    regime: Scale | str,
    *,
    epsilon: float = 0.1,
    eps_prime: float = 0.1,
) -> float:
    """Closed-form approximation of A(1 - lambda) near the upper endpoint.

    Args:
        lam: Distance lambda = 1 - phi.
        delta: 2 - alpha.
        beta: Skewness.
        regime: ``inner`` for lambda up to delta / eps', ``mid`` between that
            and delta ** (1/2 - epsilon), ``outer`` beyond delta / eps'.
        epsilon: Exponent offset of the mid-scale point.
        eps_prime: Width parameter of the inner scale.

    Returns:
        The leading-order approximant, without remainder.

    Raises:
        RegimeMismatchError: If lambda is outside the regime's range.
    """
    regime = Scale(regime)
    _check_expansion(lam, delta, regime, epsilon, eps_prime)
    if regime is Scale.INNER:
        u = lam / delta
        return u ** (1.0 / (1.0 - delta)) * (1.0 + beta + u) / (1.0 + beta + 2.0 * u) ** 2
    return 0.25 + math.pi**2 * lam * lam / 16.0


def A_prime_expansion(
    lam: float,
    delta: float,
    beta: float,
    regime: Scale | str,
    *,
    epsilon: float = 0.1,
    eps_prime: float = 0.1,
) -> float:
    """Leading-order approximation of A'(1 - lambda) on the mid and outer scales.

    The outer scale carries the delta-squared correction
    -delta**2 (1 - lambda + beta)**2 / (8 lambda**3).
    """
    regime = Scale(regime)
    if regime is Scale.INNER:
        msg = "no derivative expansion is provided on the inner scale"
        raise RegimeMismatchError(msg)
    _check_expansion(lam, delta, regime, epsilon, eps_prime)
    leading = -(math.pi**2) * lam / 8.0
    if regime is Scale.MID:
        return leading
    return leading - delta**2 * (1.0 - lam + beta) ** 2 / (8.0 * lam**3)


@dataclass(frozen=True)
class MonotoneReport:
    """Outcome of a monotonicity scan of A."""

    monotone: bool
    first_violation: float | None
    n_checked: int


def check_monotone(
    alpha: float,
    beta: float,
    n_grid: int,
    delta_threshold: float = 0.5,
) -> MonotoneReport:
    """Scan A on an interior mesh of (-varrho, 1) for increases.

    A point is a violation when A' > 0 there or A rises to the next mesh point.

    Args:
        alpha: Characteristic exponent.
        beta: Skewness.
        n_grid: Number of mesh points.
        delta_threshold: Largest delta for which decrease is expected.

    Returns:
        Whether A is decreasing and where it first fails to be.
    """
    check_shape(alpha, beta)
    if ALPHA_MAX - alpha > delta_threshold:
        logger.warning(
            "delta=%s exceeds %s; monotonicity is not expected to hold",
            ALPHA_MAX - alpha,
            delta_threshold,
        )
    lo = lower_endpoint(alpha, beta)
    width = 1.0 - lo
    mesh: list[float] = [lo + width * (k + 1) / (n_grid + 1) for k in range(n_grid)]
    previous = math.inf
    for phi in mesh:
        current = A(phi, alpha, beta)
        if current > previous or log_A_prime(phi, alpha, beta) > 0.0:
            return MonotoneReport(False, phi, n_grid)
        previous = current
    return MonotoneReport(True, None, n_grid)
