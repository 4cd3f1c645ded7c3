""" tests for the hypergeometric layer and the spectrum scan
"""
import math

import mpmath  # type: ignore
import numpy as np
import pytest

from blowup_lab.errors import ConnectionDegenerateError
from blowup_lab.errors import DomainError
from blowup_lab.errors import GammaPoleError
from blowup_lab.specfun import ComplexRectangle
from blowup_lab.specfun import FreeSolutionKind
from blowup_lab.specfun import HypergeometricParams
from blowup_lab.specfun import Phi0Representation
from blowup_lab.specfun import SpectralParameter
from blowup_lab.specfun import connection_coefficient
from blowup_lab.specfun import connection_coefficients_at_zero
from blowup_lab.specfun import eigenvalue_one_system
from blowup_lab.specfun import eigenvalue_one_wronskian
from blowup_lab.specfun import free_lambda_one_particular
from blowup_lab.specfun import free_fundamental
from blowup_lab.specfun import gamma_fn
from blowup_lab.specfun import h0
from blowup_lab.specfun import h0_tilde
from blowup_lab.specfun import h1
from blowup_lab.specfun import h1_tilde
from blowup_lab.specfun import hyp2f1
from blowup_lab.specfun import hyp2f1_derivative
from blowup_lab.specfun import hypergeometric_params
from blowup_lab.specfun import nondegeneracy_integral
from blowup_lab.specfun import phi0_via_representation
from blowup_lab.specfun import reciprocal_gamma
from blowup_lab.specfun import second_eigen_solution
from blowup_lab.specfun import spectral_ode_residual
from blowup_lab.specfun import spectrum_scan
from blowup_lab.specfun import winding_number
from blowup_lab.specfun import wronskian_free
from blowup_lab.volterra import PotentialSpec
from blowup_lab.volterra import v_equation_residual
from blowup_lab.volterra import v_potential


def _mp_hyp2f1(a, b, c, z):
    return complex(mpmath.hyp2f1(a, b, c, z))


@pytest.mark.parametrize(
    "params, z",
    [
        (HypergeometricParams(3.0 + 0.5j, 0.0 + 0.5j, 2.5), 0.3),
        (HypergeometricParams(3.0 + 0.5j, 0.0 + 0.5j, 2.5), 0.8),
        (HypergeometricParams(2.6 + 2j, -0.4 + 2j, 2.5), -0.7 + 0.2j),
        (HypergeometricParams(0.5, 1.5, 3.1), 0.95),
    ],
    ids=["series", "near one", "pfaff", "real parameters"],
)
def test_hyp2f1_matches_mpmath(params, z):
    """every evaluation branch against an arbitrary precision oracle"""
    expected = _mp_hyp2f1(params.a, params.b, params.c, z)
    assert hyp2f1(params, z) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize(
    "z",
    [
        complex(math.cos(math.pi / 3), math.sin(math.pi / 3)),
        complex(math.cos(math.pi / 3), -math.sin(math.pi / 3)),
        complex(math.cos(math.pi / 4), math.sin(math.pi / 4)),
        complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)),
        0.95 * complex(math.cos(1.2), math.sin(1.2)),
    ],
    ids=["exp(i pi/3)", "exp(-i pi/3)", "exp(i pi/4)", "exp(2i pi/3)", "inside near the arc"],
)
def test_hyp2f1_on_the_unit_circle(z):
    """points far from 0, 1 and the Pfaff disk are reached by continuation"""
    params = HypergeometricParams(0.3, 0.2, 1.7)
    expected = _mp_hyp2f1(params.a, params.b, params.c, z)
    assert hyp2f1(params, z) == pytest.approx(expected, rel=1e-10)


def test_hyp2f1_gauss_sum():
    """2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))"""
    params = HypergeometricParams(0.3, 0.4, 2.5)
    expected = math.gamma(2.5) * math.gamma(1.8) / (math.gamma(2.2) * math.gamma(2.1))
    assert hyp2f1(params, 1.0) == pytest.approx(expected, rel=1e-13)


def test_hyp2f1_domain():
    """outside the unit disk and at c = 0 it refuses"""
    with pytest.raises(DomainError):
        hyp2f1(HypergeometricParams(1.0, 1.0, 2.5), 1.5)
    with pytest.raises(DomainError):
        hyp2f1(HypergeometricParams(1.0, 1.0, 0.0), 0.5)


@pytest.mark.parametrize(
    "lam",
    [0.1 + 0.5j, 0.2 - 3.0j, 0.05 + 4.5j, 0.7 + 0.0j],
)
def test_connection_formula(lam):
    """h1 = A h0 + B h0_tilde at interior points"""
    first, second = connection_coefficients_at_zero(lam)
    for z in (0.3, 0.5, 0.7):
        combined = first * h0(z, lam) + second * h0_tilde(z, lam)
        assert combined == pytest.approx(h1(z, lam), rel=1e-8)


def test_connection_coefficient_vanishes_at_one():
    """lambda = 1 is the unstable eigenvalue"""
    assert abs(connection_coefficient(1.0)) < 1e-14
    assert abs(connection_coefficient(0.5 + 1j)) > 1e-3


def test_connection_coefficient_poles():
    """lambda + 1/2 at a non-positive integer is degenerate"""
    with pytest.raises(ConnectionDegenerateError):
        connection_coefficient(-0.5)


def test_spectrum_scan_finds_one_simple_zero():
    """exactly one zero in the standard rectangle, at 1"""
    zeros = spectrum_scan(ComplexRectangle(0.05, 2.0, -10.0, 10.0), resolution=64, tol=1e-6)
    assert len(zeros) == 1
    assert zeros[0].multiplicity == 1
    assert abs(zeros[0].location - 1.0) < 1e-6


def test_spectrum_scan_on_a_polynomial():
    """a custom function with two known zeros"""
    rect = ComplexRectangle(-1.1, 1.3, -1.2, 1.4)
    zeros = spectrum_scan(rect, func=lambda z: (z - 0.3) * (z + 0.5j), tol=1e-6)
    locations = sorted((zero.location for zero in zeros), key=lambda z: z.imag)
    assert locations[0] == pytest.approx(-0.5j, abs=1e-6)
    assert locations[1] == pytest.approx(0.3, abs=1e-6)


def test_spectrum_scan_needs_right_half_plane():
    """the connection coefficient is only scanned for Re lambda > 0"""
    with pytest.raises(DomainError):
        spectrum_scan(ComplexRectangle(-1.0, 1.0, -1.0, 1.0))


def test_degenerate_rectangle():
    """an empty rectangle is rejected"""
    with pytest.raises(DomainError):
        ComplexRectangle(1.0, 1.0, 0.0, 1.0)


def test_spectral_parameter():
    """value, bracket and reflection"""
    lam = SpectralParameter(eps=0.1, omega=2.0)
    assert lam.value == 0.1 + 2j
    assert lam.bracket == pytest.approx(math.sqrt(5.0))
    assert lam.reflected().value == pytest.approx(0.9 - 2j)
    assert lam.in_working_strip()
    with pytest.raises(DomainError):
        SpectralParameter(eps=0.5, omega=0.0).require_working_strip()


def test_wronskian_free_zeros():
    """W vanishes at 3/2 and +-1/2"""
    for lam in (1.5, 0.5, -0.5):
        assert wronskian_free(lam) == 0


@pytest.mark.parametrize(
    "lam",
    [SpectralParameter(0.05, -4.0), SpectralParameter(0.15, 0.0), SpectralParameter(0.25, 4.0)],
)
def test_phi0_representations_agree(lam):
    """the closed form and both integral forms"""
    rho = np.linspace(0.1, 0.9, 5)
    values = [phi0_via_representation(rho, lam, rep) for rep in Phi0Representation]
    for other in values[1:]:
        assert np.allclose(other, values[0], rtol=1e-8, atol=0.0)


@pytest.mark.parametrize(
    "kind",
    [FreeSolutionKind.PHI1, FreeSolutionKind.PHI1_TILDE, FreeSolutionKind.PHI0],
    ids=["phi1", "phi1 tilde", "phi0"],
)
def test_free_solutions_solve_the_ode(kind):
    """the phi solutions satisfy the spectral ODE with V = 0"""
    lam = SpectralParameter(0.1, 1.5)
    rho = np.array([0.2, 0.5, 0.8])
    values = free_fundamental(kind, rho, lam)
    first = free_fundamental(kind, rho, lam, derivative=1)
    second = free_fundamental(kind, rho, lam, derivative=2)
    residual = spectral_ode_residual(values, first, second, rho, lam)
    scale = 20 * (np.abs(values) + np.abs(first) + np.abs(second))
    assert np.all(np.abs(residual) <= 1e-7 * scale)


@pytest.mark.parametrize(
    "kind",
    [FreeSolutionKind.PSI1, FreeSolutionKind.PSI1_TILDE, FreeSolutionKind.PSI0],
    ids=["psi1", "psi1 tilde", "psi0"],
)
def test_free_psi_solutions_solve_the_v_equation(kind):
    """the psi solutions live after v = rho^2 (1 - rho^2)^(1/4 + lambda/2) u"""
    lam = SpectralParameter(0.1, 1.5)
    rho = np.array([0.2, 0.5, 0.8])
    values = free_fundamental(kind, rho, lam)
    second = free_fundamental(kind, rho, lam, derivative=2)
    residual = v_equation_residual(values, second, rho, lam, PotentialSpec.zero())
    scale = 20 * (np.abs(values) * (1 + np.abs(v_potential(rho, lam))) + np.abs(second))
    assert np.all(np.abs(residual) <= 1e-7 * scale)


def test_eigenvalue_one_wronskian():
    """W(phi0, phi1) at lambda = 1 from a finite difference"""
    rho = 0.4
    step = 1e-6
    phi0, phi1 = eigenvalue_one_system(np.array([rho - step, rho, rho + step]))
    d_phi0 = (phi0[2] - phi0[0]) / (2 * step)
    d_phi1 = (phi1[2] - phi1[0]) / (2 * step)
    wronskian = phi0[1] * d_phi1 - d_phi0 * phi1[1]
    assert wronskian == pytest.approx(eigenvalue_one_wronskian(rho), rel=1e-6)


def test_nondegeneracy_integral():
    """int_0^1 s^4 (1 - s^2)^(1/2) ds = pi / 32"""
    assert nondegeneracy_integral() == pytest.approx(math.pi / 32, rel=1e-12)


def test_gamma_poles():
    """Gamma refuses its poles, 1/Gamma vanishes there"""
    assert gamma_fn(4.5) == pytest.approx(complex(mpmath.gamma(4.5)), rel=1e-13)
    with pytest.raises(GammaPoleError):
        gamma_fn(-2.0)
    assert np.allclose(reciprocal_gamma([-2.0, 1.0]), [0.0, 1.0])


@pytest.mark.parametrize("order", [1, 2])
def test_hyp2f1_derivative(order):
    """the shifted parameter formula against mpmath"""
    params = hypergeometric_params(0.2 + 1.5j)
    z = 0.4
    expected = complex(
        mpmath.diff(lambda x: mpmath.hyp2f1(params.a, params.b, params.c, x), z, order)
    )
    assert hyp2f1_derivative(params, z, order) == pytest.approx(expected, rel=1e-9)


def test_h1_tilde():
    """the second solution at z = 1 against mpmath"""
    lam = 0.3 + 0.7j
    p = hypergeometric_params(lam)
    z = 0.6
    expected = complex(
        mpmath.power(1 - z, p.c - p.a - p.b)
        * mpmath.hyp2f1(p.c - p.a, p.c - p.b, p.c - p.a - p.b + 1, 1 - z)
    )
    assert h1_tilde(z, lam) == pytest.approx(expected, rel=1e-10)


def test_second_eigen_solution():
    """g' = -3 rho^-4 (1 - rho^2)^(-3/2) and the finite difference agrees"""
    rho = np.array([0.2, 0.5, 0.8])
    expected = -3.0 / (rho ** 4 * (1 - rho ** 2) ** 1.5)
    assert np.allclose(second_eigen_solution(rho, derivative=1), expected, rtol=1e-12)
    step = 1e-6
    difference = (second_eigen_solution(rho + step) - second_eigen_solution(rho - step)) / (
        2 * step
    )
    assert np.allclose(difference, expected, rtol=1e-6)


@pytest.mark.parametrize("rho", [0.3, 0.6])
def test_free_lambda_one_particular(rho):
    """the variation of constants solution solves the free problem at lambda = 1"""
    step = 1e-3

    def rhs(s):
        return 1.0 + s * s

    values = np.array([free_lambda_one_particular(rhs, rho + k * step) for k in (-1, 0, 1)])
    first = (values[2] - values[0]) / (2 * step)
    second = (values[2] - 2 * values[1] + values[0]) / step ** 2
    residual = spectral_ode_residual(values[1], first, second, rho, 1.0, rhs=rhs(rho))
    scale = abs(rhs(rho)) + abs(second) + abs(first) / rho + abs(values[1])
    assert abs(residual) <= 1e-4 * scale


def test_winding_number():
    """zeros count positive, poles negative"""
    rect = ComplexRectangle(-1.1, 1.3, -1.2, 1.4)
    assert winding_number(lambda z: (z - 0.3) * (z + 0.5j), rect) == 2
    assert winding_number(lambda z: 1.0 / (z - 0.3), rect) == -1
    assert winding_number(lambda z: z - 5.0, rect) == 0
