""" tests for the rate fits
"""
import numpy as np
import pytest

from blowup_lab.errors import DomainError
from blowup_lab.fitting import differenced_slope
from blowup_lab.fitting import loglog_slope
from blowup_lab.fitting import power_with_offset
from blowup_lab.fitting import semilog_slope


def test_loglog_slope():
    """y = 2 x^-1.5"""
    x = np.geomspace(1.0, 100.0, 9)
    fit = loglog_slope(x, 2 * x ** -1.5)
    assert fit.exponent == pytest.approx(-1.5)
    assert fit.scale == pytest.approx(2.0)
    assert fit.r_squared == pytest.approx(1.0)


def test_semilog_slope():
    """y = 3 exp(0.7 x)"""
    x = np.linspace(0.0, 5.0, 11)
    fit = semilog_slope(x, 3 * np.exp(0.7 * x))
    assert fit.exponent == pytest.approx(0.7)
    assert fit.scale == pytest.approx(3.0)


def test_differenced_slope_ignores_the_offset():
    """y = 3 x^-0.4 + 2"""
    x = np.geomspace(1e-3, 1e-1, 7)
    fit = differenced_slope(x, 3 * x ** -0.4 + 2)
    assert fit.exponent == pytest.approx(-0.4)
    assert fit.scale == pytest.approx(3.0)


def test_power_with_offset():
    """the offset fit recovers all three parameters"""
    x = np.geomspace(1e-3, 1e-1, 8)
    fit = power_with_offset(x, 3 * x ** -0.4 + 2)
    assert fit.exponent == pytest.approx(-0.4, abs=1e-6)
    assert fit.offset == pytest.approx(2.0, abs=1e-4)


@pytest.mark.parametrize(
    "func, x, y",
    [
        (loglog_slope, [1.0], [1.0]),
        (loglog_slope, [1.0, 2.0], [1.0, 0.0]),
        (semilog_slope, [1.0, 2.0], [0.0, 1.0]),
        (differenced_slope, [1.0, 2.0, 5.0], [1.0, 2.0, 3.0]),
        (power_with_offset, [1.0, 2.0, 4.0], [1.0, 2.0, 3.0]),
    ],
    ids=["one point", "zero value", "zero semilog", "not geometric", "too few"],
)
def test_fit_domain(func, x, y):
    """degenerate data is refused"""
    with pytest.raises(DomainError):
        func(x, y)
