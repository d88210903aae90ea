"""Score vectors and the Fisher information matrix of the standard stable law.

All ten distinct entries are integrated together as one vector-valued
integral over each half line around zeta. The half lines are cut at the
near-mode threshold, T, x1 and x2 of an IntervalPlan and integrated
numerically up to x3; beyond x3 the power-tail forms give the remainder in
closed form.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from stable_fisher import fourier
from stable_fisher.asymptotics import (
    DEFAULT_DELTA_KNOB,
    power_log_integral,
    regime_boundaries,
    tail_constant,
    tail_constant_prime,
)
from stable_fisher.density import NEAR_MODE_THRESHOLD, density_deriv_std, density_std
from stable_fisher.exceptions import DomainError, UnderflowError
from stable_fisher.params import ALPHA_MAX, PARAM_NAMES, check_shape, derive_shape
from stable_fisher.quadrature import QuadConfig, integrate_vec

logger = logging.getLogger(__name__)

UNDERFLOW_THRESHOLD = 1e-300
X3_CAP = 1e12
# numeric integration stops here at the latest; the tail forms are accurate
# to a relative y**-alpha beyond it and the inversion partials are not
TAIL_HANDOVER = 1e3
DEFAULT_T = 5.0
PSD_TOLERANCE = 1e-8

FISHER_CONFIG = QuadConfig(abs_tol=1e-9, rel_tol=1e-7, max_subdivisions=500)
# Inner integrals at one x; failures there are logged, the x-integral decides.
POINT_CONFIG = QuadConfig(abs_tol=1e-13, rel_tol=1e-10, strict=False)

PAIRS: tuple[tuple[int, int], ...] = tuple(
    itertools.combinations_with_replacement(range(4), 2)
)
_N_PAIRS = len(PAIRS)
# layout of the integrated vector: 10 products, 4 partials, the density
_PARTIALS = slice(_N_PAIRS, _N_PAIRS + 4)
_MASS = _N_PAIRS + 4

ParamIndex = t.Union[int, str]


def param_index(name: ParamIndex) -> int:
    """Map ``mu``/``sigma``/``alpha``/``beta`` (or 0..3) to an index."""
    if isinstance(name, int):
        if not 0 <= name < 4:
            msg = f"parameter index must be in 0..3, got {name!r}"
            raise ValueError(msg)
        return name
    try:
        return PARAM_NAMES.index(name)
    except ValueError:
        msg = f"unknown parameter {name!r}, expected one of {PARAM_NAMES}"
        raise ValueError(msg) from None


class Provenance(str, enum.Enum):
    """Where a Fisher matrix entry came from."""

    QUADRATURE = "quadrature"
    ASYMPTOTIC = "asymptotic"
    TABLE_LIMIT = "table_limit"


@dataclass(frozen=True)
class ScoreVector:
    """Derivatives of log f with respect to (mu, sigma, alpha, beta)."""

    s_mu: float
    s_sigma: float
    s_alpha: float
    s_beta: float

    def as_array(self) -> np.ndarray:
        """Return the scores in parameter order."""
        return np.array([self.s_mu, self.s_sigma, self.s_alpha, self.s_beta])


@dataclass
class FisherMatrix:
    """Symmetric 4x4 information matrix with per-entry provenance."""

    entries: np.ndarray
    provenance: list[list[Provenance]]
    abs_error: np.ndarray
    order_tags: dict[tuple[int, int], str] = field(default_factory=dict)

    def entry(self, i: ParamIndex, j: ParamIndex) -> float:
        """Return I_ij by name or index."""
        return float(self.entries[param_index(i), param_index(j)])

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue; nan when an entry is infinite."""
        if not np.all(np.isfinite(self.entries)):
            return math.nan
        return float(np.linalg.eigvalsh(self.entries)[0])

    def as_rows(self) -> list[dict[str, t.Any]]:
        """Upper-triangle entries as flat records."""
        rows = []
        for i, j in PAIRS:
            rows.append(
                {
                    "row": PARAM_NAMES[i],
                    "col": PARAM_NAMES[j],
                    "value": float(self.entries[i, j]),
                    "abs_error": float(self.abs_error[i, j]),
                    "provenance": self.provenance[i][j].value,
                    "order": self.order_tags.get((i, j), ""),
                }
            )
        return rows


@dataclass(frozen=True)
class IntervalPlan:
    """Cut points of each half line around zeta.

    Segments are [0, T), [T, x1), [x1, x2), [x2, x3) integrated numerically
    and [x3, inf) in closed form. A degenerate plan (x3 <= T) integrates
    [0, T) and [T, inf) instead. Either way numeric integration hands over
    to the closed form at TAIL_HANDOVER.
    """

    T: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self) -> None:
        """Check the ordering that holds at every delta."""
        if not (self.T > 0 and self.x1 < self.x2):
            msg = f"invalid interval plan {self!r}"
            raise ValueError(msg)

    @property
    def degenerate(self) -> bool:
        """True when x3 does not exceed T."""
        return self.x3 <= self.T

    def numeric_end(self) -> float:
        """Where the closed-form tail takes over."""
        if self.degenerate:
            return TAIL_HANDOVER
        return min(self.x3, TAIL_HANDOVER)

    def breakpoints(self) -> list[float]:
        """Interior cut points of the numerically integrated range."""
        if self.degenerate:
            return [NEAR_MODE_THRESHOLD, self.T]
        candidates = {NEAR_MODE_THRESHOLD, self.T, self.x1, self.x2}
        end = self.numeric_end()
        return sorted(c for c in candidates if 0.0 < c < end)


def make_interval_plan(
    alpha: float, T: float = DEFAULT_T, delta_knob: float = DEFAULT_DELTA_KNOB
) -> IntervalPlan:
    """Build the cut points x1, x2 = (2 -/+ d) sqrt(log 1/delta), x3 = exp(delta**-0.5).

    Raises:
        DomainError: If alpha = 2 (no finite plan exists).
    """
    delta = ALPHA_MAX - alpha
    if not delta > 0.0:
        msg = "an interval plan needs delta = 2 - alpha > 0"
        raise DomainError(msg)
    x1, x2 = regime_boundaries(alpha, delta_knob)
    exponent = delta**-0.5
    x3 = X3_CAP if exponent >= math.log(X3_CAP) else math.exp(exponent)
    plan = IntervalPlan(T=T, x1=x1, x2=x2, x3=x3)
    if plan.degenerate:
        logger.info(
            "x3=%s does not exceed T=%s at delta=%s; integrating [T, inf) numerically",
            x3,
            T,
            delta,
        )
    return plan


def _partials(
    x: float, alpha: float, beta: float, cfg: QuadConfig, *, with_alpha: bool = True
) -> tuple[float, np.ndarray]:
    """Return f and (f_mu, f_sigma, f_alpha, f_beta) at a standard point.

    With ``with_alpha`` false f_alpha is reported as 0.
    """
    f = density_std(x, alpha, beta, cfg).value
    y = x - derive_shape(alpha, beta).zeta
    if alpha == ALPHA_MAX or abs(y) > NEAR_MODE_THRESHOLD:
        fp = density_deriv_std(x, alpha, beta, cfg).value
    else:
        fp = fourier.density_deriv_fourier(x, alpha, beta, cfg).value
    f_b = fourier.f_beta(x, alpha, beta, cfg)
    f_a = fourier.f_alpha(x, alpha, beta, cfg) if with_alpha else f_b.scaled(0.0)
    if not (f_a.converged and f_b.converged):
        logger.debug(
            "parameter derivatives at x=%s carry errors %s, %s",
            x,
            f_a.abs_error,
            f_b.abs_error,
        )
    return f, np.array([-fp, -f - x * fp, f_a.value, f_b.value])


def score_vector(
    x: float, alpha: float, beta: float, cfg: QuadConfig = POINT_CONFIG
) -> ScoreVector:
    """Scores at a standard point.

    Raises:
        UnderflowError: If f(x) is below 1e-300.
    """
    check_shape(alpha, beta)
    f, partials = _partials(x, alpha, beta, cfg)
    if f < UNDERFLOW_THRESHOLD:
        msg = f"f({x!r}; {alpha!r}, {beta!r}) = {f!r} underflows"
        raise UnderflowError(msg)
    s = partials / f
    return ScoreVector(float(s[0]), float(s[1]), float(s[2]), float(s[3]))


def _integrand_vector(
    u: float, side: float, alpha: float, beta: float, cfg: QuadConfig
) -> np.ndarray:
    x = derive_shape(alpha, beta).zeta + side * u
    out = np.zeros(_MASS + 1)
    # alpha entries at alpha = 2 come from the boundary limits, not this integral
    f, partials = _partials(x, alpha, beta, cfg, with_alpha=alpha < ALPHA_MAX)
    if f < UNDERFLOW_THRESHOLD:
        logger.debug("excluding x=%s from information integrals, f=%s", x, f)
        return out
    for k, (i, j) in enumerate(PAIRS):
        out[k] = partials[i] * partials[j] / f
    out[_PARTIALS] = partials
    out[_MASS] = f
    return out


def _poly_mul(a: list[float], b: list[float]) -> list[float]:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


# One term of a tail form: (decay exponent, coefficients of 1, log y, log(y)**2)
TailTerm = tuple[float, list[float]]


def tail_forms(side: float, alpha: float, beta: float) -> list[list[TailTerm]]:
    """Power-tail forms of (f_mu, f_sigma, f_alpha, f_beta) on one half line.

    Derived from f ~ k (1 + beta*) y**-(1 + alpha) with y = |x - zeta|,
    differentiating k, the exponent and zeta.
    """
    k = tail_constant(alpha)
    k_prime = tail_constant_prime(alpha)
    zeta = derive_shape(alpha, beta).zeta
    half_angle = 0.5 * math.pi * alpha
    zeta_alpha = -beta * 0.5 * math.pi / math.cos(half_angle) ** 2
    zeta_beta = -math.tan(half_angle)
    one_plus = 1.0 + side * beta
    p = 1.0 + alpha
    scale = k * one_plus
    return [
        [(p + 1.0, [side * p * scale])],
        [(p, [alpha * scale]), (p + 1.0, [side * zeta * p * scale])],
        [
            (p, [one_plus * k_prime, -scale]),
            (p + 1.0, [side * p * scale * zeta_alpha]),
        ],
        [(p, [side * k]), (p + 1.0, [side * p * scale * zeta_beta])],
    ]


def tail_vector(side: float, alpha: float, beta: float, start: float) -> np.ndarray:
    """Closed-form integrals over |x - zeta| > start on one half line.

    Returns the vector in the layout of the numerical integrand: products
    f_i f_j / f, then the partials, then f itself.
    """
    forms = tail_forms(side, alpha, beta)
    p = 1.0 + alpha
    norm = tail_constant(alpha) * (1.0 + side * beta)
    out = np.zeros(_MASS + 1)
    for idx, (i, j) in enumerate(PAIRS):
        out[idx] = sum(
            power_log_integral(start, ea + eb - p, [c / norm for c in _poly_mul(ca, cb)])
            for ea, ca in forms[i]
            for eb, cb in forms[j]
        )
    for idx, terms in enumerate(forms):
        out[_N_PAIRS + idx] = sum(
            power_log_integral(start, e, coeffs) for e, coeffs in terms
        )
    out[_MASS] = power_log_integral(start, p, [norm])
    return out


@dataclass(frozen=True)
class FisherIntegrals:
    """Integrated products, partials and mass with error estimates."""

    values: np.ndarray
    errors: np.ndarray
    n_evals: int
    converged: bool


def _integrate_side(
    side: float,
    alpha: float,
    beta: float,
    plan: IntervalPlan | None,
    cfg: QuadConfig,
    point_cfg: QuadConfig,
) -> FisherIntegrals:
    def integrand(u: float) -> np.ndarray:
        return _integrand_vector(u, side, alpha, beta, point_cfg)

    if plan is None:
        cut = DEFAULT_T
        near, near_err, near_n, near_ok = integrate_vec(
            integrand, 0.0, cut, cfg, points=[NEAR_MODE_THRESHOLD]
        )
        far, far_err, far_n, far_ok = integrate_vec(integrand, cut, math.inf, cfg)
        errors = np.full(_MASS + 1, near_err + far_err)
        return FisherIntegrals(near + far, errors, near_n + far_n, near_ok and far_ok)

    end = plan.numeric_end()
    values, err, n_evals, ok = integrate_vec(
        integrand, 0.0, end, cfg, points=plan.breakpoints()
    )
    tail = tail_vector(side, alpha, beta, end)
    errors = err + np.abs(tail)
    return FisherIntegrals(values + tail, errors, n_evals, ok)


@lru_cache(maxsize=64)
def fisher_integrals(
    alpha: float,
    beta: float,
    plan: IntervalPlan | None = None,
    cfg: QuadConfig = FISHER_CONFIG,
    threads: int = 1,
) -> FisherIntegrals:
    """Integrate all information products over the real line.

    At alpha = 2 no plan is used and both half lines run to infinity.
    """
    check_shape(alpha, beta)
    if alpha < ALPHA_MAX and plan is None:
        plan = make_interval_plan(alpha)
    point_cfg = replace(POINT_CONFIG, max_evaluations=cfg.max_evaluations)
    sides = (1.0, -1.0)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            halves = list(
                pool.map(
                    lambda s: _integrate_side(s, alpha, beta, plan, cfg, point_cfg),
                    sides,
                )
            )
    else:
        halves = [_integrate_side(s, alpha, beta, plan, cfg, point_cfg) for s in sides]
    return FisherIntegrals(
        values=halves[0].values + halves[1].values,
        errors=halves[0].errors + halves[1].errors,
        n_evals=halves[0].n_evals + halves[1].n_evals,
        converged=halves[0].converged and halves[1].converged,
    )


def _gaussian_alpha_entry(i: int, j: int) -> float | None:
    """Alpha entries at alpha = 2 come from the boundary limits."""
    alpha_idx = PARAM_NAMES.index("alpha")
    if alpha_idx not in (i, j):
        return None
    return float(table1_limits().entries[i, j])


def fisher_entry(
    i: ParamIndex,
    j: ParamIndex,
    alpha: float,
    beta: float,
    plan: IntervalPlan | None = None,
    cfg: QuadConfig = FISHER_CONFIG,
) -> tuple[float, float]:
    """Return (I_ij, abs_error) by quadrature."""
    a, b = sorted((param_index(i), param_index(j)))
    if alpha == ALPHA_MAX:
        limit = _gaussian_alpha_entry(a, b)
        if limit is not None:
            return limit, 0.0
    integrals = fisher_integrals(alpha, beta, plan, cfg)
    k = PAIRS.index((a, b))
    return float(integrals.values[k]), float(integrals.errors[k])


def score_mean(
    theta: ParamIndex,
    alpha: float,
    beta: float,
    plan: IntervalPlan | None = None,
    cfg: QuadConfig = FISHER_CONFIG,
) -> tuple[float, float]:
    """Return (int f_theta dx, abs_error), zero for a correctly normalized law."""
    k = _N_PAIRS + param_index(theta)
    integrals = fisher_integrals(alpha, beta, plan, cfg)
    return float(integrals.values[k]), float(integrals.errors[k])


def fisher_matrix(
    alpha: float,
    beta: float,
    plan: IntervalPlan | None = None,
    cfg: QuadConfig = FISHER_CONFIG,
    threads: int = 1,
) -> FisherMatrix:
    """Assemble the full matrix by quadrature."""
    integrals = fisher_integrals(alpha, beta, plan, cfg, threads)
    entries = np.zeros((4, 4))
    errors = np.zeros((4, 4))
    provenance = [[Provenance.QUADRATURE] * 4 for _ in range(4)]
    for k, (i, j) in enumerate(PAIRS):
        value = float(integrals.values[k])
        error = float(integrals.errors[k])
        source = Provenance.QUADRATURE
        if alpha == ALPHA_MAX:
            limit = _gaussian_alpha_entry(i, j)
            if limit is not None:
                value, error, source = limit, 0.0, Provenance.TABLE_LIMIT
        entries[i, j] = entries[j, i] = value
        errors[i, j] = errors[j, i] = error
        provenance[i][j] = provenance[j][i] = source
    matrix = FisherMatrix(entries=entries, provenance=provenance, abs_error=errors)
    smallest = matrix.min_eigenvalue()
    if smallest < -PSD_TOLERANCE:
        logger.warning(
            "information matrix at alpha=%s beta=%s has eigenvalue %s",
            alpha,
            beta,
            smallest,
        )
    return matrix


_ORDER_TAGS: dict[tuple[str, str], str] = {
    ("mu", "sigma"): "o(1)",
    ("mu", "alpha"): "o(1)",
    ("mu", "beta"): "O(delta)",
    ("sigma", "beta"): "o(delta log log 1/delta)",
    ("alpha", "beta"): "o(1/log 1/delta)",
}


def fisher_asymptotic(alpha: float, beta: float) -> FisherMatrix:
    """Leading-order matrix as delta -> 0.

    Entries known only through an order bound are 0 with an order tag.

    Raises:
        DomainError: If delta is not in (0, 1/e) or |beta| >= 1.
    """
    delta = ALPHA_MAX - alpha
    if not 0.0 < delta < math.exp(-1.0):
        msg = f"asymptotic matrix needs 0 < delta < 1/e, got delta={delta!r}"
        raise DomainError(msg)
    if not abs(beta) < 1.0:
        msg = f"asymptotic matrix needs |beta| < 1, got {beta!r}"
        raise DomainError(msg)
    log_inv = math.log(1.0 / delta)
    named = {
        ("mu", "mu"): 0.5,
        ("sigma", "sigma"): 2.0,
        ("alpha", "alpha"): 1.0 / (4.0 * delta * log_inv),
        ("sigma", "alpha"): -0.5 * math.log(log_inv),
        ("beta", "beta"): delta / (4.0 * (1.0 - beta * beta) * log_inv),
    }
    return _constant_matrix(named, Provenance.ASYMPTOTIC, _ORDER_TAGS)


def table1_limits() -> FisherMatrix:
    """Limits of the information matrix as alpha -> 2."""
    named = {
        ("mu", "mu"): 0.5,
        ("sigma", "sigma"): 2.0,
        ("alpha", "alpha"): math.inf,
        ("sigma", "alpha"): -math.inf,
    }
    return _constant_matrix(named, Provenance.TABLE_LIMIT, {})


def _constant_matrix(
    named: dict[tuple[str, str], float],
    source: Provenance,
    tags: dict[tuple[str, str], str],
) -> FisherMatrix:
    entries = np.zeros((4, 4))
    for (row, col), value in named.items():
        i, j = param_index(row), param_index(col)
        entries[i, j] = entries[j, i] = value
    order_tags = {}
    for (row, col), tag in tags.items():
        i, j = sorted((param_index(row), param_index(col)))
        order_tags[(i, j)] = tag
    return FisherMatrix(
        entries=entries,
        provenance=[[source] * 4 for _ in range(4)],
        abs_error=np.zeros((4, 4)),
        order_tags=order_tags,
    )
