"""Parameter validation and derived quantities."""

from __future__ import annotations

# flake8: noqa
import math

import pytest

from stable_fisher.exceptions import InvalidParameterError
from stable_fisher.params import (
    StableParams,
    beta_star,
    derive,
    derive_shape,
    standardize,
)


def test_defaults_are_gaussian():
    p = StableParams()
    assert (p.mu, p.sigma, p.alpha, p.beta) == (0.0, 1.0, 2.0, 0.0)
    assert p.delta == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        pytest.param({"alpha": 1.0}, id="alpha-one"),
        pytest.param({"alpha": 2.5}, id="alpha-above-two"),
        pytest.param({"alpha": math.nan}, id="alpha-nan"),
        pytest.param({"beta": 1.0}, id="beta-one"),
        pytest.param({"beta": -0.9995}, id="beta-past-clip"),
        pytest.param({"sigma": 0.0}, id="sigma-zero"),
        pytest.param({"sigma": -1.0}, id="sigma-negative"),
        pytest.param({"mu": math.inf}, id="mu-infinite"),
    ],
)
def test_rejects_out_of_range(kwargs):
    with pytest.raises(InvalidParameterError):
        StableParams(**kwargs)


def test_invalid_parameter_is_value_error():
    with pytest.raises(ValueError, match="alpha"):
        StableParams(alpha=0.5)


def test_replace_validates():
    p = StableParams(alpha=1.7, beta=0.2)
    assert p.replace(beta=-0.2).beta == -0.2
    with pytest.raises(InvalidParameterError):
        p.replace(alpha=3.0)


def test_zeta_at_three_quarter_turn():
    # tan(3 pi / 4) = -1
    assert derive_shape(1.5, 0.5).zeta == pytest.approx(0.5, abs=1e-15)


def test_varrho_formula():
    d = derive_shape(1.5, 0.5)
    expected = 2.0 / (1.5 * math.pi) * math.atan(0.5 * math.tan(0.75 * math.pi))
    assert d.varrho == pytest.approx(expected, rel=1e-14)
    assert d.delta == pytest.approx(0.5)


@pytest.mark.parametrize("beta", [0.0, 0.5, -0.999])
def test_gaussian_boundary_has_exact_zeros(beta):
    d = derive_shape(2.0, beta)
    assert d.zeta == 0.0
    assert d.varrho == 0.0
    assert d.delta == 0.0


def test_symmetric_law_has_no_shift():
    d = derive(StableParams(alpha=1.3, beta=0.0))
    assert d.zeta == 0.0
    assert d.varrho == 0.0


def test_skew_flips_with_beta():
    right = derive_shape(1.8, 0.4)
    left = derive_shape(1.8, -0.4)
    assert right.zeta == -left.zeta
    assert right.varrho == -left.varrho
    # tan(pi alpha / 2) < 0 on (1, 2), so zeta has the sign of beta
    assert right.zeta > 0


def test_sign_dependent_quantities():
    d = derive_shape(1.8, 0.4)
    assert beta_star(d.zeta + 1.0, 1.8, 0.4) == 0.4
    assert beta_star(d.zeta - 1.0, 1.8, 0.4) == -0.4
    assert beta_star(d.zeta, 1.8, 0.4) == 0.0
    assert d.varrho_star(d.zeta - 2.0) == -d.varrho


def test_standardize():
    x_std, scale = standardize(3.0, StableParams(mu=1.0, sigma=2.0, alpha=1.5))
    assert x_std == 1.0
    assert scale == 0.5
