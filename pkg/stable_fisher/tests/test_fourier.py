"""Characteristic function inversion and the parameter derivatives of f."""

from __future__ import annotations

# flake8: noqa
import math

import pytest

from stable_fisher import fourier
from stable_fisher.density import density_std
from stable_fisher.quadrature import fd_derivative

from .core import gaussian, tight_config, value_at_zero


@pytest.mark.parametrize("t_", [-3.0, -0.4, 0.7, 2.5])
def test_characteristic_modulus(t_):
    evaluation = fourier.characteristic(t_, 1.7, 0.6)
    assert abs(evaluation.value) == pytest.approx(
        math.exp(-(abs(t_) ** 1.7)), rel=1e-13
    )
    assert evaluation.decay_envelope == pytest.approx(abs(evaluation.value), rel=1e-13)


def test_characteristic_at_origin():
    assert fourier.cf(0.0, 1.3, -0.8) == complex(1.0, 0.0)


def test_characteristic_conjugate_symmetry():
    assert fourier.cf(-1.2, 1.6, 0.5) == pytest.approx(
        fourier.cf(1.2, 1.6, 0.5).conjugate(), abs=1e-15
    )


def test_gaussian_characteristic():
    assert fourier.cf(1.5, 2.0, 0.7) == complex(math.exp(-2.25), 0.0)


def test_truncation_point():
    upper = fourier.truncation_point(1.5)
    assert math.exp(-(upper**1.5)) == pytest.approx(fourier.TRUNCATION_LEVEL, rel=1e-9)


def test_inversion_at_origin():
    cfg = tight_config()
    assert fourier.density_fourier(0.0, 1.6, 0.0, cfg).value == pytest.approx(
        value_at_zero(1.6), abs=1e-10
    )
    assert fourier.density_fourier(0.0, 2.0, 0.0, cfg).value == pytest.approx(
        gaussian(0.0), abs=1e-10
    )


def test_oscillatory_branch():
    # |x| > 10 switches to the weighted rule
    cfg = tight_config()
    inverted = fourier.density_fourier(12.0, 1.8, 0.3, cfg).value
    assert inverted == pytest.approx(density_std(12.0, 1.8, 0.3, cfg).value, abs=1e-9)


def test_derivative_inversion():
    cfg = tight_config()
    assert fourier.density_deriv_fourier(1.0, 2.0, 0.0, cfg).value == pytest.approx(
        -0.5 * gaussian(1.0), abs=1e-10
    )


@pytest.mark.parametrize("x", [-2.0, 0.3, 1.2, 4.0])
def test_alpha_derivative(x):
    cfg = tight_config()
    numeric = fd_derivative(
        lambda a: fourier.density_fourier(x, a, 0.5, cfg).value, 1.8, 1e-3
    )
    assert fourier.f_alpha(x, 1.8, 0.5, cfg).value == pytest.approx(numeric, abs=1e-5)


@pytest.mark.parametrize("x", [-2.0, 0.3, 1.2, 4.0])
def test_beta_derivative(x):
    cfg = tight_config()
    numeric = fd_derivative(
        lambda b: fourier.density_fourier(x, 1.8, b, cfg).value, 0.5, 1e-3
    )
    assert fourier.f_beta(x, 1.8, 0.5, cfg).value == pytest.approx(numeric, abs=1e-5)


def test_beta_derivative_vanishes_at_gaussian():
    result = fourier.f_beta(0.7, 2.0, 0.4)
    assert result.value == 0.0
    assert result.abs_error == 0.0
    assert result.converged


@pytest.mark.parametrize("x", [0.5, 2.0, 6.0])
def test_symmetric_law_has_antisymmetric_beta_derivative(x):
    cfg = tight_config()
    assert fourier.f_beta(x, 1.7, 0.0, cfg).value == pytest.approx(
        -fourier.f_beta(-x, 1.7, 0.0, cfg).value, abs=1e-8
    )


@pytest.mark.parametrize("x", [-3.0, 0.6, 2.5, 12.0])
def test_alpha_derivative_reflection(x):
    cfg = tight_config()
    direct = fourier.f_alpha(x, 1.9, 0.3, cfg)
    mirrored = fourier.f_alpha(-x, 1.9, -0.3, cfg)
    assert direct.value == pytest.approx(mirrored.value, abs=1e-8)
    assert math.isfinite(direct.abs_error)
    assert direct.n_evals > 0


@pytest.mark.slow
def test_skewness_derivative_is_of_order_delta():
    cfg = tight_config()
    constants = []
    for delta in (0.2, 0.1, 0.05):
        worst = max(
            abs(fourier.f_beta(-10.0 + k, 2.0 - delta, 0.5, cfg).value) for k in range(21)
        )
        constants.append(worst / delta)
    assert max(constants) <= 2.0 * min(constants)
