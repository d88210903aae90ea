"""Core and tail approximants near the Gaussian boundary."""

from __future__ import annotations

# flake8: noqa
import math

import pytest
from scipy import integrate as sp_integrate

from stable_fisher import asymptotics
from stable_fisher.asymptotics import RegimeKind
from stable_fisher.density import density_std
from stable_fisher.exceptions import DomainError
from stable_fisher.params import derive_shape

from .core import gaussian, tight_config


def test_tail_term():
    # (1 + 0) * 0.1 * 3**(0.1 - 3)
    assert asymptotics.F2(3.0, 1.9, 0.0) == pytest.approx(0.1 * 3.0**-2.9, rel=1e-14)
    assert asymptotics.F2(0.0, 1.9, 0.0) == math.inf


def test_core_term():
    zeta = derive_shape(1.9, 0.4).zeta
    assert asymptotics.F1(zeta + 1.0, 1.9, 0.4) == pytest.approx(gaussian(1.0))


def test_tail_skew_weights():
    zeta = derive_shape(1.9, 0.5).zeta
    right = asymptotics.F2(zeta + 4.0, 1.9, 0.5)
    left = asymptotics.F2(zeta - 4.0, 1.9, 0.5)
    assert right / left == pytest.approx(3.0)


def test_approximate_derivative():
    numeric = (
        asymptotics.g_density(3.001, 1.95, 0.2) - asymptotics.g_density(2.999, 1.95, 0.2)
    ) / 0.002
    assert asymptotics.g_deriv(3.0, 1.95, 0.2) == pytest.approx(numeric, rel=1e-5)


def test_regime_boundaries():
    low, high = asymptotics.regime_boundaries(1.99, 0.5)
    root = math.sqrt(math.log(100.0))
    assert low == pytest.approx(1.5 * root)
    assert high == pytest.approx(2.5 * root)


@pytest.mark.parametrize(
    "x,kind",
    [
        pytest.param(0.0, RegimeKind.CORE, id="core"),
        pytest.param(4.0, RegimeKind.CROSSOVER, id="crossover"),
        pytest.param(-5.0, RegimeKind.CROSSOVER, id="crossover-left"),
        pytest.param(7.0, RegimeKind.TAIL, id="tail"),
    ],
)
def test_classify(x, kind):
    # boundaries 3.219 and 5.365 at delta = 0.01
    regime = asymptotics.classify(x, 1.99)
    assert regime.kind is kind
    assert regime.delta_knob == asymptotics.DEFAULT_DELTA_KNOB


@pytest.mark.parametrize(
    "alpha,knob",
    [
        pytest.param(2.0, 0.5, id="gaussian"),
        pytest.param(1.5, 1.5, id="knob-too-large"),
        pytest.param(1.9, 0.0, id="knob-zero"),
    ],
)
def test_boundaries_domain(alpha, knob):
    with pytest.raises(DomainError):
        asymptotics.regime_boundaries(alpha, knob)


def test_branch_scores():
    assert asymptotics.score_mu_core(2.0) == 1.0
    assert asymptotics.score_mu_tail(6.0) == 0.5
    assert asymptotics.score_sigma_core(2.0) == 2.0
    assert asymptotics.score_sigma_tail(123.0) == 2.0


def test_location_score_limits():
    # far out the tail dominates and the score tends to 3 / y
    assert asymptotics.score_mu_approx(50.0, 1.9, 0.0) == pytest.approx(
        3.0 / 50.0, rel=1e-6
    )
    # near the centre the Gaussian core dominates
    assert asymptotics.score_mu_approx(1.0, 1.9999, 0.0) == pytest.approx(0.5, rel=0.05)
    assert asymptotics.score_sigma_approx(50.0, 1.9, 0.0) == pytest.approx(2.0, rel=1e-6)


def test_tail_scores_need_tail_start():
    with pytest.raises(DomainError):
        asymptotics.f_alpha_tail(1.0, 1.9, 0.0)
    assert asymptotics.f_alpha_tail(10.0, 1.9, 0.0) == pytest.approx(-(10.0**-2.9))
    assert asymptotics.f_beta_tail(-10.0, 1.9, 0.0) == pytest.approx(-0.1 * 10.0**-2.9)


def test_tail_constant():
    assert asymptotics.tail_constant(2.0) == pytest.approx(0.0, abs=1e-15)
    assert asymptotics.tail_constant(1.99) / 0.01 == pytest.approx(0.99, abs=0.01)
    assert asymptotics.tail_constant_prime(1.999) == pytest.approx(-1.0, abs=0.01)
    numeric = (asymptotics.tail_constant(1.7001) - asymptotics.tail_constant(1.6999)) / 2e-4
    assert asymptotics.tail_constant_prime(1.7) == pytest.approx(numeric, rel=1e-6)


def test_tail_constant_matches_density():
    cfg = tight_config()
    y = 200.0
    zeta = derive_shape(1.8, 0.4).zeta
    expected = asymptotics.tail_constant(1.8) * 1.4 * y**-2.8
    assert density_std(zeta + y, 1.8, 0.4, cfg).value == pytest.approx(expected, rel=0.01)


@pytest.mark.parametrize(
    "exponent,coeffs",
    [
        pytest.param(3.0, [1.0], id="plain"),
        pytest.param(2.5, [0.3, -1.2], id="log"),
        pytest.param(4.0, [0.0, 0.0, 2.0], id="log-squared"),
    ],
)
def test_power_log_integral(exponent, coeffs):
    start = 2.0

    def integrand(y):
        log_y = math.log(y)
        return sum(c * log_y**k for k, c in enumerate(coeffs)) * y**-exponent

    expected, _ = sp_integrate.quad(integrand, start, math.inf, epsabs=1e-14, epsrel=1e-12)
    assert asymptotics.power_log_integral(start, exponent, coeffs) == pytest.approx(
        expected, rel=1e-9
    )


def test_power_log_integral_closed_form():
    # int_2^inf y**-3 dy = 1/8
    assert asymptotics.power_log_integral(2.0, 3.0, [1.0]) == pytest.approx(0.125)


def test_power_log_integral_diverges():
    with pytest.raises(DomainError):
        asymptotics.power_log_integral(2.0, 1.0, [1.0])
    with pytest.raises(ValueError):
        asymptotics.power_log_integral(2.0, 3.0, [1.0, 1.0, 1.0, 1.0])


@pytest.mark.slow
def test_approximation_tightens_toward_gaussian():
    cfg = tight_config()
    errors = []
    for alpha in (1.98, 1.995, 1.999):
        zeta = derive_shape(alpha, 0.0).zeta
        x = zeta + 1.0
        exact = density_std(x, alpha, 0.0, cfg).value
        errors.append(abs(asymptotics.g_density(x, alpha, 0.0) / exact - 1.0))
    assert errors[0] > errors[1] > errors[2]


def test_tail_band_tightens_toward_gaussian():
    cfg = tight_config()
    worst = []
    for delta in (0.1, 0.05, 0.02):
        alpha = 2.0 - delta
        ratios = [
            asymptotics.g_density(y, alpha, 0.0) / density_std(y, alpha, 0.0, cfg).value
            for y in (20.0, 50.0, 100.0)
        ]
        worst.append(max(abs(r - 1.0) for r in ratios))
    assert worst[0] > worst[1] > worst[2]
    # tail constant k against delta
    assert worst[2] < 0.03
