"""Independent reference computations."""

from __future__ import annotations

# flake8: noqa
import math

import numpy as np
import pytest

from stable_fisher import oracle
from stable_fisher.fourier import density_fourier

from .core import gaussian, tight_config, value_at_zero


def test_compare_passes_within_tolerance():
    report = oracle.compare("x", 1.0 + 1e-9, 1.0, abs_tol=1e-8)
    assert report.passed
    assert report.abs_diff == pytest.approx(1e-9)
    assert report.tolerance == 1e-8


def test_compare_relative_tolerance():
    report = oracle.compare("x", 101.0, 100.0, abs_tol=1e-6, rel_tol=1e-3)
    assert not report.passed
    assert report.rel_diff == pytest.approx(0.01)
    assert report.tolerance == pytest.approx(0.1)


def test_compare_against_zero():
    assert oracle.compare("x", 0.0, 0.0).rel_diff == 0.0
    assert oracle.compare("x", 1.0, 0.0).rel_diff == math.inf


def test_report_record():
    record = oracle.compare("density(0;2,0)", 0.5, 0.5).to_record()
    assert record["pass"] is True
    assert "passed" not in record
    assert record["quantity"] == "density(0;2,0)"


def test_gaussian_scores_by_differences():
    s = oracle.score_fd(1.0, 2.0, 0.0)
    assert s.s_mu == pytest.approx(0.5, abs=1e-7)
    assert s.s_sigma == pytest.approx(-0.5, abs=1e-7)


def test_skew_reflection_of_scores():
    right = oracle.score_fd(1.5, 1.8, 0.3)
    left = oracle.score_fd(-1.5, 1.8, -0.3)
    assert left.s_mu == pytest.approx(-right.s_mu, abs=1e-6)
    assert left.s_sigma == pytest.approx(right.s_sigma, abs=1e-6)
    assert left.s_beta == pytest.approx(-right.s_beta, abs=1e-6)


def test_closed_forms():
    values = dict(oracle.closed_forms())
    assert values["density(0;1.5,0)"] == pytest.approx(value_at_zero(1.5), rel=1e-14)
    assert values["density(0;2,0)"] == pytest.approx(gaussian(0.0), rel=1e-14)
    assert values["density_deriv(1;2,0)"] == pytest.approx(-0.5 * gaussian(1.0), rel=1e-14)
    assert values["zeta(1.5,0.5)"] == pytest.approx(0.5, rel=1e-14)
    assert len(values) == 9


def test_vectorized_inversion():
    xs = np.array([-3.0, 0.0, 0.7, 2.5])
    grid = oracle.fourier_grid(xs, 1.8, 0.3)
    cfg = tight_config()
    for x, value in zip(xs, grid):
        assert value == pytest.approx(density_fourier(float(x), 1.8, 0.3, cfg).value, abs=1e-10)


def test_trapezoid_gaussian():
    assert oracle.fisher_trapezoid("mu", "mu", 2.0, 0.0, n=20_001) == pytest.approx(
        0.5, abs=1e-4
    )
    assert oracle.fisher_trapezoid("sigma", "sigma", 2.0, 0.0, n=20_001) == pytest.approx(
        2.0, abs=1e-3
    )


def test_trapezoid_needs_points():
    with pytest.raises(ValueError, match="at least"):
        oracle.fisher_trapezoid("mu", "mu", 1.9, 0.0, n=999)


@pytest.mark.slow
def test_verify_all_passes():
    reports = list(oracle.verify_all())
    failures = [r.quantity for r in reports if not r.passed]
    assert not failures
    assert len(reports) == 9 + 1 + 4 + 3
