""" special functions and the closed form objects of the spectral problem

Gamma, the Gauss hypergeometric function, the free fundamental systems of the
spectral ODE, their Wronskian, the connection coefficient and an argument
principle scan for its zeros.
"""
import logging
import math

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from numpy.polynomial import legendre
from scipy import integrate
from scipy import special

from .errors import ConnectionDegenerateError
from .errors import ContourError
from .errors import DomainError
from .errors import GammaPoleError
from .errors import HypergeometricDegenerateError
from .errors import QuadratureConvergenceError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]

# below rho * <lambda> = SMALL_RHO phi0 is taken from the double integral
SMALL_RHO = 0.05

_EPS = np.finfo(float).eps

# steps of the ray continuation of 2F1 to the arc of the unit circle away from 1
MAX_CONTINUATION_STEPS = 200

# series in z or z / (z - 1) are summed up to this modulus
DIRECT_RADIUS = 0.8


@dataclass(frozen=True)
class SpectralParameter:
    """lambda = eps + i omega"""

    eps: float
    omega: float

    @classmethod
    def from_complex(cls, value: complex) -> "SpectralParameter":
        """split a complex number"""
        value = complex(value)
        return cls(eps=value.real, omega=value.imag)

    @property
    def value(self) -> complex:
        """lambda as a complex number"""
        return complex(self.eps, self.omega)

    @property
    def bracket(self) -> float:
        """<omega> = (1 + omega^2)^(1/2)"""
        return math.hypot(1.0, self.omega)

    def reflected(self) -> "SpectralParameter":
        """1 - lambda"""
        return SpectralParameter(eps=1.0 - self.eps, omega=-self.omega)

    def in_working_strip(self) -> bool:
        """0 <= eps <= 1/4"""
        return 0.0 <= self.eps <= 0.25

    def require_working_strip(self) -> None:
        """raise unless 0 <= eps <= 1/4"""
        if not self.in_working_strip():
            raise DomainError(f"{self} lies outside the strip 0 <= Re lambda <= 1/4")

    def __complex__(self) -> complex:
        return self.value


Lambda = Union[SpectralParameter, complex, float]


def as_complex(lam: Lambda) -> complex:
    """the complex value of a spectral parameter"""
    if isinstance(lam, SpectralParameter):
        return lam.value
    return complex(lam)


def as_parameter(lam: Lambda) -> SpectralParameter:
    """the SpectralParameter for lam"""
    if isinstance(lam, SpectralParameter):
        return lam
    return SpectralParameter.from_complex(lam)


@dataclass(frozen=True)
class HypergeometricParams:
    """the parameters (a, b; c) of 2F1"""

    a: complex
    b: complex
    c: complex


class FreeSolutionKind(Enum):
    """the members of the free fundamental systems"""

    PSI1 = "psi1"
    PSI1_TILDE = "psi1_tilde"
    PSI0 = "psi0"
    PHI1 = "phi1"
    PHI1_TILDE = "phi1_tilde"
    PHI0 = "phi0"


class Phi0Representation(Enum):
    """the three equivalent formulas for phi0"""

    DIRECT = "direct"
    SINGLE_INTEGRAL = "single_integral"
    DOUBLE_INTEGRAL = "double_integral"


def _is_nonpositive_integer(value: complex, tol: float = 1e-13) -> bool:
    value = complex(value)
    if abs(value.imag) > tol:
        return False
    nearest = round(value.real)
    return nearest <= 0 and abs(value.real - nearest) <= tol


def _is_integer(value: complex, tol: float = 1e-12) -> bool:
    value = complex(value)
    return abs(value.imag) <= tol and abs(value.real - round(value.real)) <= tol


def gamma_fn(z: complex) -> complex:
    """Gamma(z), raising GammaPoleError at the poles"""
    if _is_nonpositive_integer(z, tol=0.0):
        raise GammaPoleError(f"Gamma has a pole at {z}")
    return complex(special.gamma(complex(z)))


def reciprocal_gamma(z: ArrayLike) -> ArrayLike:
    """1/Gamma(z), zero at the poles of Gamma"""
    return special.rgamma(np.asarray(z, dtype=complex))


def _series(a: complex, b: complex, c: complex, z: complex, max_terms: int) -> complex:
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    small = 0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) <= _EPS * abs(total):
            small += 1
            if small == 2:
                return total
        else:
            small = 0
    raise QuadratureConvergenceError(
        f"2F1 series ({a}, {b}; {c}; {z}) did not converge in {max_terms} terms"
    )


def _one_minus_z(a: complex, b: complex, c: complex, z: complex, max_terms: int) -> complex:
    excess = c - a - b
    if _is_integer(excess):
        raise HypergeometricDegenerateError(
            f"c - a - b = {excess} is an integer, the logarithmic case is not supported"
        )
    w = 1.0 - z
    first = (
        gamma_fn(c)
        * gamma_fn(excess)
        * complex(reciprocal_gamma(c - a))
        * complex(reciprocal_gamma(c - b))
        * _series(a, b, 1.0 - excess, w, max_terms)
    )
    second = (
        w ** excess
        * gamma_fn(c)
        * gamma_fn(-excess)
        * complex(reciprocal_gamma(a))
        * complex(reciprocal_gamma(b))
        * _series(c - a, c - b, 1.0 + excess, w, max_terms)
    )
    return first + second


def _taylor_step(  # pylint: disable=too-many-arguments,too-many-locals
    a: complex,
    b: complex,
    c: complex,
    z0: complex,
    value: complex,
    slope: complex,
    h: complex,
    max_terms: int,
) -> Tuple[complex, complex]:
    # z (1 - z) w'' + (c - (a + b + 1) z) w' - a b w = 0 expanded about z0
    p0 = z0 * (1.0 - z0)
    p1 = 1.0 - 2.0 * z0
    q0 = c - (a + b + 1.0) * z0
    q1 = -(a + b + 1.0)
    coefficients = [value, slope]
    total = value + slope * h
    derivative = slope + 0.0j
    small = 0
    for n in range(max_terms):
        upper, lower = coefficients[-1], coefficients[-2]
        nxt = -(
            (p1 * n * (n + 1) + q0 * (n + 1)) * upper + (-n * (n - 1) + q1 * n - a * b) * lower
        ) / (p0 * (n + 1) * (n + 2))
        coefficients.append(nxt)
        term = nxt * h ** (n + 2)
        total += term
        derivative += (n + 2) * nxt * h ** (n + 1)
        if abs(term) <= _EPS * abs(total):
            small += 1
            if small == 2:
                return total, derivative
        else:
            small = 0
    raise QuadratureConvergenceError(
        f"2F1 Taylor step from {z0} by {h} did not converge in {max_terms} terms"
    )


def _continued(a: complex, b: complex, c: complex, z: complex, max_terms: int) -> complex:
    """integrate the hypergeometric ODE along the ray from |z| = 0.45 out to z

    Each step stays within half the distance to the nearer singular point 0 or 1,
    so every Taylor series converges at least like 2^-n.
    """
    current = 0.45 * z / abs(z)
    value = _series(a, b, c, current, max_terms)
    slope = a * b / c * _series(a + 1.0, b + 1.0, c + 1.0, current, max_terms)
    for _step in range(MAX_CONTINUATION_STEPS):
        remaining = z - current
        if remaining == 0:
            return value
        reach = 0.5 * min(abs(current), abs(1.0 - current))
        h = remaining if abs(remaining) <= reach else remaining / abs(remaining) * reach
        value, slope = _taylor_step(a, b, c, current, value, slope, h, max_terms)
        current = current + h
    raise QuadratureConvergenceError(
        f"2F1 continuation to {z} needed more than {MAX_CONTINUATION_STEPS} steps"
    )


def hyp2f1(p: HypergeometricParams, z: complex, max_terms: int = 5000) -> complex:
    """the Gauss hypergeometric function on the closed unit disk

    The power series is summed where |z| <= 1/2, the 1 - z connection formula
    where |1 - z| <= 1/2, the Pfaff transformation where it shrinks the argument
    below 0.8, and Gauss' sum at z = 1. The rest of the disk, the arc around
    exp(+-i pi/3) included, is reached by Taylor steps of the hypergeometric ODE.

    :param p: The parameters
    :type p: HypergeometricParams
    :param z: The argument, |z| <= 1
    :type z: complex
    :param max_terms: The series cap
    :type max_terms: int
    :return: 2F1(a, b; c; z)
    :rtype: complex
    """
    a, b, c = complex(p.a), complex(p.b), complex(p.c)
    z = complex(z)
    if _is_nonpositive_integer(c):
        raise DomainError(f"c = {c} is a non-positive integer")
    if abs(z) > 1.0 + 1e-14:
        raise DomainError(f"|z| = {abs(z)} lies outside the closed unit disk")
    if z == 0:
        return 1.0 + 0.0j
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _series(a, b, c, z, max_terms)
    if z == 1:
        excess = c - a - b
        if excess.real <= 0:
            raise DomainError(f"2F1 diverges at z = 1 for Re(c - a - b) = {excess.real}")
        return (
            gamma_fn(c)
            * gamma_fn(excess)
            * complex(reciprocal_gamma(c - a))
            * complex(reciprocal_gamma(c - b))
        )
    if abs(z) <= 0.5:
        return _series(a, b, c, z, max_terms)
    if abs(1.0 - z) <= 0.5:
        return _one_minus_z(a, b, c, z, max_terms)
    w = z / (z - 1.0)
    if abs(w) <= DIRECT_RADIUS and abs(w) < abs(z):
        return (1.0 - z) ** (-a) * _series(a, c - b, c, w, max_terms)
    if abs(z) <= DIRECT_RADIUS:
        return _series(a, b, c, z, max_terms)
    return _continued(a, b, c, z, max_terms)


def hyp2f1_derivative(p: HypergeometricParams, z: complex, order: int = 1) -> complex:
    """d^k/dz^k 2F1 = (a)_k (b)_k / (c)_k 2F1(a + k, b + k; c + k; z)"""
    factor = 1.0 + 0.0j
    for k in range(order):
        factor *= (p.a + k) * (p.b + k) / (p.c + k)
    shifted = HypergeometricParams(a=p.a + order, b=p.b + order, c=p.c + order)
    return factor * hyp2f1(shifted, z)


def hypergeometric_params(lam: Lambda) -> HypergeometricParams:
    """a = lambda/2 + 5/2, b = lambda/2 - 1/2, c = 5/2"""
    value = as_complex(lam)
    return HypergeometricParams(a=value / 2 + 2.5, b=value / 2 - 0.5, c=2.5 + 0j)


def h0(z: complex, lam: Lambda, derivative: int = 0) -> complex:
    """the solution regular at z = 0, 2F1(a, b; c; z)"""
    p = hypergeometric_params(lam)
    if derivative:
        return hyp2f1_derivative(p, z, derivative)
    return hyp2f1(p, z)


def h0_tilde(z: complex, lam: Lambda) -> complex:
    """the solution singular at z = 0, z^(1-c) 2F1(a-c+1, b-c+1; 2-c; z)"""
    p = hypergeometric_params(lam)
    shifted = HypergeometricParams(a=p.a - p.c + 1, b=p.b - p.c + 1, c=2 - p.c)
    return complex(z) ** (1 - p.c) * hyp2f1(shifted, z)


def h1(z: complex, lam: Lambda, derivative: int = 0) -> complex:
    """the solution regular at z = 1, 2F1(a, b; a+b+1-c; 1-z)"""
    p = hypergeometric_params(lam)
    shifted = HypergeometricParams(a=p.a, b=p.b, c=p.a + p.b + 1 - p.c)
    w = 1.0 - complex(z)
    if derivative:
        return (-1) ** derivative * hyp2f1_derivative(shifted, w, derivative)
    return hyp2f1(shifted, w)


def h1_tilde(z: complex, lam: Lambda) -> complex:
    """the second solution at z = 1, (1-z)^(c-a-b) 2F1(c-a, c-b; c-a-b+1; 1-z)"""
    p = hypergeometric_params(lam)
    shifted = HypergeometricParams(a=p.c - p.a, b=p.c - p.b, c=p.c - p.a - p.b + 1)
    w = 1.0 - complex(z)
    return w ** (p.c - p.a - p.b) * hyp2f1(shifted, w)


def connection_coefficients_at_zero(lam: Lambda) -> Tuple[complex, complex]:
    """(A, B) with h1 = A h0 + B h0_tilde"""
    value = as_complex(lam)
    if _is_nonpositive_integer(value + 0.5):
        raise ConnectionDegenerateError(f"Gamma(lambda + 1/2) has a pole at lambda = {value}")
    p = hypergeometric_params(value)
    common = gamma_fn(p.a + p.b - p.c + 1)
    first = (
        gamma_fn(1 - p.c)
        * common
        * complex(reciprocal_gamma(p.a - p.c + 1))
        * complex(reciprocal_gamma(p.b - p.c + 1))
    )
    return first, connection_coefficient(value)


def connection_coefficient(lam: Lambda) -> complex:
    """Gamma(c-1) Gamma(a+b-c+1) / (Gamma(a) Gamma(b)), with 1/Gamma(pole) = 0

    Its zeros in the right half plane are the unstable eigenvalues.
    """
    value = as_complex(lam)
    if _is_nonpositive_integer(value + 0.5):
        raise ConnectionDegenerateError(f"Gamma(lambda + 1/2) has a pole at lambda = {value}")
    return complex(connection_coefficient_values(np.array([value]))[0])


def connection_coefficient_values(lams: np.ndarray) -> np.ndarray:
    """vectorized connection coefficient, no pole checks"""
    lams = np.asarray(lams, dtype=complex)
    return (
        special.gamma(1.5)
        * special.gamma(lams + 0.5)
        * special.rgamma(lams / 2 + 2.5)
        * special.rgamma(lams / 2 - 0.5)
    )


def wronskian_free(lam: Lambda) -> complex:
    """W(lambda) = (3 - 2 lambda)(1 + 2 lambda)(-1 + 2 lambda)"""
    value = as_complex(lam)
    return (3 - 2 * value) * (1 + 2 * value) * (-1 + 2 * value)


def _product_form(
    rho: np.ndarray,
    powers: Tuple[complex, complex, complex],
    linear: Tuple[complex, complex],
    derivative: int,
    complement: Optional[np.ndarray] = None,
) -> np.ndarray:
    """rho^p0 (1-rho)^p1 (1+rho)^p2 (alpha + beta rho) and its first two derivatives

    ``complement`` carries 1 - rho when it is known more accurately than the
    difference, close to rho = 1.
    """
    p0, p1, p2 = powers
    alpha, beta = linear
    gap = 1 - rho if complement is None else complement
    base = rho ** p0 * gap ** p1 * (1 + rho) ** p2
    affine = alpha + beta * rho
    if derivative == 0:
        return base * affine
    log_slope = p0 / rho - p1 / gap + p2 / (1 + rho)
    d_base = base * log_slope
    if derivative == 1:
        return d_base * affine + base * beta
    slope_change = -p0 / rho ** 2 - p1 / gap ** 2 - p2 / (1 + rho) ** 2
    dd_base = base * (log_slope ** 2 + slope_change)
    return dd_base * affine + 2 * d_base * beta


def transform_weight(
    rho: ArrayLike, lam: Lambda, derivative: int = 0, complement: Optional[ArrayLike] = None
) -> np.ndarray:
    """rho^2 (1 - rho^2)^(1/4 + lambda/2), the factor with v = weight * u"""
    value = as_complex(lam)
    mu = 0.25 + value / 2
    gap = None if complement is None else np.asarray(complement, dtype=complex)
    return _product_form(np.asarray(rho, dtype=complex), (2, mu, mu), (1, 0), derivative, gap)


def _shape(kind: FreeSolutionKind, lam: complex):
    if kind is FreeSolutionKind.PSI1:
        return (-1, 0.25 + lam / 2, 0.75 - lam / 2), (2, 2 * lam - 1)
    if kind is FreeSolutionKind.PSI1_TILDE:
        return (-1, 0.75 - lam / 2, 0.25 + lam / 2), (2, 1 - 2 * lam)
    if kind is FreeSolutionKind.PHI1:
        return (-3, 0, 0.5 - lam), (2, 2 * lam - 1)
    if kind is FreeSolutionKind.PHI1_TILDE:
        return (-3, 0.5 - lam, 0), (2, 1 - 2 * lam)
    raise DomainError(f"{kind} has no product form")


@lru_cache(maxsize=16)
def _gauss(count: int) -> Tuple[np.ndarray, np.ndarray]:
    return legendre.leggauss(count)


def _phi0_double(rho: np.ndarray, lam: complex, derivative: int, count: int) -> np.ndarray:
    nodes, weights = _gauss(count)
    t1, w1 = nodes, weights
    t2, w2 = (nodes + 1) / 2, weights / 2
    product = np.multiply.outer(t1, t2)
    weight = np.multiply.outer(w1, w2)
    moments = {0: (0, 2, 0), 1: (1, 3, 1), 2: (2, 4, 2)}[derivative]
    power, t1_power, t2_power = moments
    factor = -wronskian_free(lam) / 4
    exponent = -1.5 - lam
    for k in range(power):
        factor *= exponent - k
    integrand = (
        weight[None, :, :]
        * t1[None, :, None] ** t1_power
        * t2[None, None, :] ** t2_power
        * (1 + rho[:, None, None] * product[None, :, :]) ** (exponent - power)
    )
    return factor * integrand.sum(axis=(1, 2))


def _adaptive(evaluate: Callable[[int], np.ndarray], start: int = 16, limit: int = 512):
    previous = evaluate(start)
    count = start
    while count < limit:
        count *= 2
        current = evaluate(count)
        scale = np.maximum(np.abs(current), np.finfo(float).tiny)
        if np.all(np.abs(current - previous) <= 1e-14 * scale + 1e-300):
            return current
        previous = current
    logger.warning("phi0 quadrature stopped at %s nodes without settling", count)
    return previous


def _phi0_single(rho: np.ndarray, lam: complex) -> np.ndarray:
    prefactor = (3 - 2 * lam) * (-1 + 2 * lam) / (2 * rho)

    def evaluate(count: int) -> np.ndarray:
        nodes, weights = _gauss(count)
        integrand = (1 + np.multiply.outer(rho, nodes)) ** (-0.5 - lam) * nodes
        return integrand @ weights

    return prefactor * _adaptive(evaluate)


def _check_rho(rho: ArrayLike, complement: Optional[ArrayLike] = None) -> np.ndarray:
    values = np.asarray(rho, dtype=float)
    if complement is None:
        if np.any(values <= 0) or np.any(values >= 1):
            raise DomainError("rho must lie strictly inside (0, 1)")
    elif np.any(values <= 0) or np.any(np.asarray(complement, dtype=float) <= 0):
        raise DomainError("rho and 1 - rho must both be positive")
    return values


def _phi0(
    rho: np.ndarray, lam: complex, derivative: int, complement: Optional[np.ndarray] = None
) -> np.ndarray:
    small = rho * math.hypot(1.0, abs(lam)) < SMALL_RHO
    out = np.empty(rho.shape, dtype=complex)
    big = ~small
    if np.any(big):
        rb = rho[big].astype(complex)
        gap = None if complement is None else complement[big].astype(complex)
        out[big] = _product_form(rb, *_shape(FreeSolutionKind.PHI1, lam), derivative, gap) - (
            _product_form(rb, *_shape(FreeSolutionKind.PHI1_TILDE, lam), derivative, gap)
        )
    if np.any(small):
        out[small] = _phi0_double(rho[small], lam, derivative, 24)
    return out


def free_fundamental(
    kind: Union[FreeSolutionKind, str],
    rho: ArrayLike,
    lam: Lambda,
    derivative: int = 0,
    complement: Optional[ArrayLike] = None,
) -> ArrayLike:
    """evaluate a member of the free fundamental systems

    psi0 and phi0 are evaluated without subtracting the nearly equal psi1 and
    psi1_tilde when rho <lambda> is small.

    :param kind: Which solution
    :type kind: FreeSolutionKind
    :param rho: Points in (0, 1)
    :type rho: float or numpy.ndarray
    :param lam: The spectral parameter
    :type lam: SpectralParameter or complex
    :param derivative: 0, 1 or 2
    :type derivative: int
    :param complement: 1 - rho, when known more accurately than the difference
    :type complement: float or numpy.ndarray
    :return: The values
    :rtype: complex or numpy.ndarray
    """
    kind = FreeSolutionKind(kind)
    if derivative not in (0, 1, 2):
        raise DomainError(f"derivative order {derivative} is not supported")
    value = as_complex(lam)
    points = _check_rho(rho, complement)
    flat = np.atleast_1d(points)
    gap = None if complement is None else np.atleast_1d(np.asarray(complement, dtype=float))
    if kind is FreeSolutionKind.PHI0:
        result = _phi0(flat, value, derivative, gap)
    elif kind is FreeSolutionKind.PSI0:
        result = sum(
            math.comb(derivative, k)
            * transform_weight(flat, value, derivative - k, gap)
            * _phi0(flat, value, k, gap)
            for k in range(derivative + 1)
        )
    else:
        cgap = None if gap is None else gap.astype(complex)
        result = _product_form(flat.astype(complex), *_shape(kind, value), derivative, cgap)
    if np.ndim(points) == 0:
        return complex(result[0])
    return result


def phi0_via_representation(
    rho: ArrayLike, lam: Lambda, rep: Union[Phi0Representation, str]
) -> ArrayLike:
    """phi0 from the closed form, the single integral or the double integral"""
    rep = Phi0Representation(rep)
    value = as_complex(lam)
    points = _check_rho(rho)
    flat = np.atleast_1d(points)
    if rep is Phi0Representation.DIRECT:
        result = _product_form(
            flat.astype(complex), *_shape(FreeSolutionKind.PHI1, value), 0
        ) - _product_form(flat.astype(complex), *_shape(FreeSolutionKind.PHI1_TILDE, value), 0)
    elif rep is Phi0Representation.SINGLE_INTEGRAL:
        result = _phi0_single(flat, value)
    else:
        result = _adaptive(lambda count: _phi0_double(flat, value, 0, count))
    if np.ndim(points) == 0:
        return complex(result[0])
    return result


def spectral_ode_residual(
    values: ArrayLike,
    first: ArrayLike,
    second: ArrayLike,
    rho: ArrayLike,
    lam: Lambda,
    potential: ArrayLike = 0.0,
    rhs: ArrayLike = 0.0,
) -> np.ndarray:
    """-(1-rho^2)u'' + (-4/rho + (2 lambda + 5) rho)u' + ((lambda+5/2)(lambda+3/2) + V)u - F"""
    value = as_complex(lam)
    rho = np.asarray(rho, dtype=float)
    return (
        -(1 - rho ** 2) * np.asarray(second)
        + (-4 / rho + (2 * value + 5) * rho) * np.asarray(first)
        + ((value + 2.5) * (value + 1.5) + np.asarray(potential)) * np.asarray(values)
        - np.asarray(rhs)
    )


def eigenvalue_one_system(rho: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """the free fundamental system (phi0, phi1) at lambda = 1 in explicit form"""
    rho = _check_rho(rho)
    phi1 = (2 + rho) / (rho ** 3 * np.sqrt(1 + rho))
    phi0 = ((2 + rho) / np.sqrt(1 + rho) - (2 - rho) / np.sqrt(1 - rho)) / rho ** 3
    return phi0, phi1


def eigenvalue_one_wronskian(rho: ArrayLike) -> np.ndarray:
    """W(phi0, phi1) = 3 rho^-4 (1 - rho^2)^(-3/2) at lambda = 1"""
    rho = _check_rho(rho)
    return 3.0 / (rho ** 4 * (1 - rho ** 2) ** 1.5)


def free_lambda_one_particular(rhs: Callable[[float], float], rho: float) -> float:
    """variation of constants solution of the free lambda = 1 problem with data F"""
    phi0, phi1 = eigenvalue_one_system(rho)

    def outer(s: float) -> float:
        return s * (2 + s) * math.sqrt(1 - s) * rhs(s)

    def inner(s: float) -> float:
        return s * ((2 + s) * math.sqrt(1 - s) - (2 - s) * math.sqrt(1 + s)) * rhs(s)

    right, _err = integrate.quad(outer, rho, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    left, _err = integrate.quad(inner, 0.0, rho, epsabs=0.0, epsrel=1e-13, limit=200)
    return float(-phi0 * right / 3 - phi1 * left / 3)


def second_eigen_solution(rho: ArrayLike, derivative: int = 0) -> np.ndarray:
    """(1 + 4 rho^2 - 8 rho^4) / (rho^3 (1 - rho^2)^(1/2)), next to the constant eigenfunction"""
    rho = _check_rho(rho)
    numerator = 1 + 4 * rho ** 2 - 8 * rho ** 4
    denominator = rho ** 3 * np.sqrt(1 - rho ** 2)
    if derivative == 0:
        return numerator / denominator
    d_numerator = 8 * rho - 32 * rho ** 3
    log_slope = 3 / rho - rho / (1 - rho ** 2)
    return d_numerator / denominator - numerator * log_slope / denominator


def nondegeneracy_integral() -> float:
    """int_0^1 s^4 (1 - s^2)^(1/2) ds, the obstruction to a Jordan block at lambda = 1"""
    value, _err = integrate.quad(
        lambda s: s ** 4 * math.sqrt(1 - s * s), 0.0, 1.0, epsabs=0.0, epsrel=1e-13
    )
    return value


@dataclass(frozen=True)
class ComplexRectangle:
    """[re_min, re_max] x [im_min, im_max]"""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        """extent along the real axis"""
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        """extent along the imaginary axis"""
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        """the midpoint"""
        return complex((self.re_min + self.re_max) / 2, (self.im_min + self.im_max) / 2)

    @property
    def diameter(self) -> float:
        """the diagonal"""
        return math.hypot(self.width, self.height)

    def corners(self) -> List[complex]:
        """counter-clockwise from the lower left"""
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def contains(self, value: complex) -> bool:
        """closed containment"""
        return self.re_min <= value.real <= self.re_max and self.im_min <= value.imag <= self.im_max

    def split(self, fraction_re: Optional[float], fraction_im: Optional[float]):
        """cut along the real and/or imaginary direction"""
        re_cuts = [self.re_min, self.re_max]
        im_cuts = [self.im_min, self.im_max]
        if fraction_re is not None:
            re_cuts.insert(1, self.re_min + fraction_re * self.width)
        if fraction_im is not None:
            im_cuts.insert(1, self.im_min + fraction_im * self.height)
        return [
            ComplexRectangle(re_cuts[i], re_cuts[i + 1], im_cuts[j], im_cuts[j + 1])
            for i in range(len(re_cuts) - 1)
            for j in range(len(im_cuts) - 1)
        ]


@dataclass(frozen=True)
class SpectralZero:
    """a zero located inside a small box"""

    location: complex
    multiplicity: int
    radius: float


# off-center cuts keep box edges away from zeros sitting on round numbers
_SPLIT_FRACTIONS = (0.5123, 0.4729, 0.5377, 0.4411)

# vertical lines where the connection formula degenerates
_DEGENERATE_REAL_PARTS = tuple(0.5 + k for k in range(0, 8))


def _nudge(rect: ComplexRectangle, shift: float = 1e-6) -> ComplexRectangle:
    re_min, re_max = rect.re_min, rect.re_max
    for line in _DEGENERATE_REAL_PARTS:
        if abs(re_min - line) < shift:
            re_min = line - shift
        if abs(re_max - line) < shift:
            re_max = line + shift
    if (re_min, re_max) != (rect.re_min, rect.re_max):
        logger.debug("nudged rectangle edges off the degenerate lines: %s, %s", re_min, re_max)
    return ComplexRectangle(re_min, re_max, rect.im_min, rect.im_max)


class _Contour:  # pylint: disable=too-few-public-methods
    """argument principle bookkeeping for one function"""

    def __init__(self, func: Callable, resolution: int, floor: float, max_refine: int = 40):
        self._func = func
        self._resolution = resolution
        self._floor = floor
        self._max_refine = max_refine

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        values = np.asarray(self._func(points), dtype=complex)
        if not np.all(np.isfinite(values)):
            raise ContourError("the function is not finite on the contour")
        if np.any(np.abs(values) <= self._floor):
            raise ContourError("the contour passes too close to a zero or pole")
        return values

    def edge_phase(self, start: complex, stop: complex) -> float:
        """total phase change along one edge, refined until every step is below pi/4"""
        params = np.linspace(0.0, 1.0, self._resolution + 1)
        values = self._evaluate(start + params * (stop - start))
        for _ in range(self._max_refine):
            steps = np.angle(values[1:] / values[:-1])
            coarse = np.abs(steps) >= np.pi / 4
            if not np.any(coarse):
                return float(steps.sum())
            mids = (params[:-1][coarse] + params[1:][coarse]) / 2
            mid_values = self._evaluate(start + mids * (stop - start))
            params = np.concatenate([params, mids])
            values = np.concatenate([values, mid_values])
            order = np.argsort(params)
            params, values = params[order], values[order]
        raise ContourError("edge phase did not resolve under refinement")

    def winding(self, rect: ComplexRectangle) -> int:
        """number of zeros minus poles inside rect"""
        corners = rect.corners()
        total = sum(
            self.edge_phase(corners[k], corners[(k + 1) % 4]) for k in range(4)
        )
        turns = total / (2 * np.pi)
        count = int(round(turns))
        if abs(turns - count) > 0.1:
            raise ContourError(f"winding number {turns} is not close to an integer")
        return count


def _floor_for(func: Callable, rect: ComplexRectangle, near_tol: float) -> float:
    corners = rect.corners()
    samples = np.concatenate(
        [np.linspace(corners[k], corners[(k + 1) % 4], 33) for k in range(4)]
    )
    magnitude = np.nanmax(np.abs(np.asarray(func(samples), dtype=complex)))
    return near_tol * magnitude / rect.diameter


def winding_number(
    func: Callable[[np.ndarray], np.ndarray],
    rect: ComplexRectangle,
    resolution: int = 64,
    near_tol: float = 1e-8,
) -> int:
    """argument principle count of zeros minus poles of func inside rect"""
    contour = _Contour(func, resolution, _floor_for(func, rect, near_tol))
    return contour.winding(rect)


def _localize(
    contour: _Contour, rect: ComplexRectangle, count: int, tol: float
) -> List[SpectralZero]:
    if count == 0:
        return []
    if rect.width <= tol and rect.height <= tol:
        return [SpectralZero(location=rect.center, multiplicity=count, radius=rect.diameter / 2)]
    for fraction in _SPLIT_FRACTIONS:
        pieces = rect.split(
            fraction if rect.width > tol else None, fraction if rect.height > tol else None
        )
        try:
            counts = [contour.winding(piece) for piece in pieces]
        except ContourError as exc:
            logger.warning("subdivision of %s failed (%s), retrying", rect, exc)
            continue
        if sum(counts) != count:
            logger.warning("subdivision of %s lost zeros, retrying", rect)
            continue
        found: List[SpectralZero] = []
        for piece, piece_count in zip(pieces, counts):
            found.extend(_localize(contour, piece, piece_count, tol))
        return found
    raise ContourError(f"could not subdivide {rect}")


def spectrum_scan(
    rect: ComplexRectangle,
    resolution: int = 64,
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol: float = 1e-6,
    near_tol: float = 1e-8,
) -> List[SpectralZero]:
    """locate the zeros of the connection coefficient (or func) inside rect

    :param rect: The search rectangle, in Re lambda > 0 for the connection coefficient
    :type rect: ComplexRectangle
    :param resolution: Initial samples per edge
    :type resolution: int
    :param func: An alternative vectorized function
    :type func: callable
    :param tol: Final box size
    :type tol: float
    :param near_tol: Relative distance at which a contour counts as touching a zero
    :type near_tol: float
    :return: The zeros with multiplicities, sorted by real then imaginary part
    :rtype: list
    """
    if func is None:
        if rect.re_min <= 0:
            raise DomainError("the scan rectangle must lie in Re lambda > 0")
        func = connection_coefficient_values
        rect = _nudge(rect)
    contour = _Contour(func, resolution, _floor_for(func, rect, near_tol))
    total = None
    for shift in (0.0, 1.3e-6, -2.9e-6):
        shifted = ComplexRectangle(
            rect.re_min + shift, rect.re_max + shift, rect.im_min + shift, rect.im_max + shift
        )
        try:
            total = contour.winding(shifted)
        except ContourError as exc:
            logger.warning("outer contour failed (%s), shifting", exc)
            continue
        rect = shifted
        break
    if total is None:
        raise ContourError(f"the boundary of {rect} passes too close to a zero or pole")
    logger.debug("winding number %s on %s", total, rect)
    zeros = _localize(contour, rect, total, tol)
    return sorted(zeros, key=lambda zero: (zero.location.real, zero.location.imag))


def zero_locations(zeros: Sequence[SpectralZero]) -> List[complex]:
    """the centers of the located boxes"""
    return [zero.location for zero in zeros]
