""" tests for the panel rules and the Fourier quadratures
"""
import math

import numpy as np
import pytest

from blowup_lab.errors import DomainError
from blowup_lab.quadrature import PanelGrid
from blowup_lab.quadrature import PanelMap
from blowup_lab.quadrature import endpoint_exp_grid
from blowup_lab.quadrature import filon_fourier
from blowup_lab.quadrature import geometric_log_grid
from blowup_lab.quadrature import oscillatory_fourier


def _square_moment(k, x):
    """an antiderivative of x^2 exp(i k x)"""
    ik = 1j * k
    return np.exp(ik * x) * (x ** 2 / ik - 2 * x / ik ** 2 + 2 / ik ** 3)


@pytest.mark.parametrize("k", [5.0, -5.0, 40.0], ids=["positive", "negative", "fast"])
def test_filon_is_exact_for_quadratics(k):
    """x^2 is reproduced by the piecewise quadratic interpolant"""
    x = np.linspace(0.0, 1.0, 21)
    result = filon_fourier(x ** 2, 0.0, x[1] - x[0], k)
    expected = _square_moment(k, 1.0) - _square_moment(k, 0.0)
    assert result[0] == pytest.approx(expected, rel=1e-12)


def test_filon_reduces_to_simpson():
    """at k = 0 the rule is Simpson's"""
    x = np.linspace(0.0, 1.0, 11)
    assert filon_fourier(x ** 2, 0.0, 0.1, 0.0)[0] == pytest.approx(1.0 / 3.0)


def test_filon_trailing_axes():
    """columns are integrated independently"""
    x = np.linspace(0.0, 1.0, 21)
    values = np.stack([x ** 2, 2 * x ** 2], axis=1)
    result = filon_fourier(values, 0.0, 0.05, [3.0, 7.0])
    assert result.shape == (2, 2)
    assert np.allclose(result[:, 1], 2 * result[:, 0])


def test_filon_needs_odd_samples():
    """an even sample count has no Simpson pairing"""
    with pytest.raises(DomainError):
        filon_fourier(np.ones(4), 0.0, 0.1, 1.0)


@pytest.mark.parametrize(
    "func, parity, expected",
    [
        (lambda w: math.exp(-w * w), "even", lambda a: math.sqrt(math.pi) * math.exp(-a * a / 4)),
        (
            lambda w: w * math.exp(-w * w),
            "odd",
            lambda a: 0.5j * a * math.sqrt(math.pi) * math.exp(-a * a / 4),
        ),
        (
            lambda w: (1 + w) * math.exp(-w * w),
            "none",
            lambda a: (1 + 0.5j * a) * math.sqrt(math.pi) * math.exp(-a * a / 4),
        ),
    ],
    ids=["gaussian", "odd gaussian", "mixed"],
)
def test_oscillatory_fourier(func, parity, expected):
    """Fourier transforms of gaussians"""
    for a in (0.5, -2.0, 3.0):
        assert oscillatory_fourier(func, a, parity) == pytest.approx(expected(a), abs=1e-9)


def test_oscillatory_fourier_rejects_zero_frequency():
    """a = 0 is not an oscillatory integral"""
    with pytest.raises(DomainError):
        oscillatory_fourier(math.cos, 0.0)
    with pytest.raises(DomainError):
        oscillatory_fourier(math.cos, 1.0, parity="both")


def test_log_grid_integrates_scale_invariant_weight():
    """int ds / s over [1e-3, 1] = log(1000)"""
    grid = geometric_log_grid(1e-3, 1.0)
    assert grid.start == pytest.approx(1e-3)
    assert grid.integrate(1.0 / grid.points).real == pytest.approx(math.log(1000.0), rel=1e-13)


def test_exp_grid_keeps_the_endpoint_weight():
    """int (1 - s)^(-1/2) ds up to 1 - exp(-20)"""
    grid = endpoint_exp_grid(0.0, 20.0, 1.0)
    assert grid.stop_complement == pytest.approx(math.exp(-20.0))
    value = grid.integrate(grid.complements ** -0.5).real
    assert value == pytest.approx(2 * (1 - math.exp(-10.0)), rel=1e-12)


def test_cumulative_and_antiderivative():
    """integrals of x^2 and cos on a linear grid"""
    grid = PanelGrid.uniform(PanelMap.LINEAR, 0.0, 1.0, 0.25)
    forward = grid.cumulative(grid.points ** 2)
    assert np.allclose(forward.real, grid.points ** 3 / 3, atol=1e-14)
    backward = grid.cumulative(grid.points ** 2, backward=True)
    assert np.allclose(backward.real, (1 - grid.points ** 3) / 3, atol=1e-14)
    x = np.array([0.1, 0.33, 0.9])
    assert np.allclose(grid.antiderivative(np.cos(grid.points), x).real, np.sin(x), atol=1e-13)
    assert np.allclose(
        grid.antiderivative(np.cos(grid.points), x, backward=True).real,
        math.sin(1.0) - np.sin(x),
        atol=1e-13,
    )


def test_interpolation_derivatives():
    """value, first and second derivative of sin"""
    grid = PanelGrid.concatenate(
        [
            PanelGrid.uniform(PanelMap.LINEAR, 0.0, 0.5, 0.5),
            PanelGrid.uniform(PanelMap.LINEAR, 0.5, 1.0, 0.25),
        ]
    )
    values = np.sin(grid.points)
    x = np.array([0.05, 0.5, 0.77])
    assert np.allclose(grid.interpolate(values, x).real, np.sin(x), atol=1e-13)
    assert np.allclose(grid.interpolate(values, x, derivative=1).real, np.cos(x), atol=1e-11)
    assert np.allclose(grid.interpolate(values, x, derivative=2).real, -np.sin(x), atol=1e-8)


def test_locate_outside_the_grid():
    """points past either end are rejected"""
    grid = PanelGrid.uniform(PanelMap.LINEAR, 0.2, 0.8, 0.3)
    with pytest.raises(DomainError):
        grid.locate(0.1)
    with pytest.raises(DomainError):
        grid.locate(0.9)
    with pytest.raises(DomainError):
        PanelGrid([])
