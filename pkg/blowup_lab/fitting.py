""" rate fits used to turn measured decay into exponents
"""
import logging
import math

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from scipy.optimize import curve_fit

from .errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateFit:
    """value ~ scale * x ** exponent (+ offset)"""

    exponent: float
    scale: float
    offset: float = 0.0
    r_squared: float = float("nan")


def _r_squared(observed: np.ndarray, predicted: np.ndarray) -> float:
    ss_res = float(np.sum((observed - predicted) ** 2))
    ss_tot = float(np.sum((observed - np.mean(observed)) ** 2))
    if ss_tot == 0:
        return float("nan")
    return 1 - ss_res / ss_tot


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """least squares line through (log x, log |y|)

    :param x: Positive abscissae
    :param y: Nonzero values
    :returns: The fitted exponent and scale
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.size < 2:
        raise DomainError("a rate fit needs at least two points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("a log-log fit needs positive data")
    log_x, log_y = np.log(x), np.log(y)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    fit = RateFit(
        exponent=float(slope),
        scale=float(np.exp(intercept)),
        r_squared=_r_squared(log_y, slope * log_x + intercept),
    )
    logger.debug("log-log fit over %s points: %s", x.size, fit)
    return fit


def semilog_slope(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """least squares line through (x, log |y|), the exponent is a growth rate"""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.size < 2:
        raise DomainError("a rate fit needs at least two points")
    if np.any(y <= 0):
        raise DomainError("a semilog fit needs nonzero data")
    log_y = np.log(y)
    slope, intercept = np.polyfit(x, log_y, 1)
    return RateFit(
        exponent=float(slope),
        scale=float(np.exp(intercept)),
        r_squared=_r_squared(log_y, slope * x + intercept),
    )


def differenced_slope(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """the exponent of y = A x^p + B from consecutive differences

    On a geometric x grid y[k+1] - y[k] = A (q^p - 1) x[k]^p, so the offset
    drops out of the log-log slope of the differences.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise DomainError("a differenced fit needs at least three points")
    ratios = x[1:] / x[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-9):
        raise DomainError("a differenced fit needs geometrically spaced abscissae")
    fit = loglog_slope(x[:-1], np.diff(y))
    factor = ratios[0] ** fit.exponent - 1
    return RateFit(exponent=fit.exponent, scale=fit.scale / abs(factor), r_squared=fit.r_squared)


def _power_with_offset(x, scale, exponent, offset):
    return scale * x ** exponent + offset


def power_with_offset(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """fit y = A x^p + B, for quantities that tend to a finite limit

    The log-log slope of such data is biased towards zero when B is
    comparable to A x^p, so small-argument exponents are taken from this fit.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise DomainError("an offset power fit needs at least four points")
    try:
        guess = differenced_slope(x, y)
        scale = math.copysign(guess.scale, y[-1] - y[0]) * (
            1 if guess.exponent > 0 else -1
        )
        offset = float(np.mean(y - scale * x ** guess.exponent))
    except DomainError:
        guess = loglog_slope(x, y)
        scale, offset = guess.scale, 0.0
    p0 = [scale, guess.exponent, offset]
    popt, _pcov = curve_fit(_power_with_offset, x, y, p0=p0, maxfev=20000)
    fit = RateFit(
        exponent=float(popt[1]),
        scale=float(popt[0]),
        offset=float(popt[2]),
        r_squared=_r_squared(y, _power_with_offset(x, *popt)),
    )
    logger.debug("offset power fit over %s points: %s", x.size, fit)
    return fit
