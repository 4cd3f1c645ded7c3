""" tests for the Green function and the resolvent
"""
import numpy as np
import pytest

from blowup_lab.coords import RadialField
from blowup_lab.coords import RadialGrid
from blowup_lab.coords import StatePair
from blowup_lab.errors import DomainError
from blowup_lab.errors import ResolventSetError
from blowup_lab.green import CutoffSpec
from blowup_lab.green import GreenKernel
from blowup_lab.green import bvp_solve_direct
from blowup_lab.green import collocation_operator
from blowup_lab.green import green_component
from blowup_lab.green import green_eval
from blowup_lab.green import green_derivative_jump
from blowup_lab.green import green_free_eval
from blowup_lab.green import resolvent_apply
from blowup_lab.green import resolvent_rhs
from blowup_lab.specfun import SpectralParameter
from blowup_lab.volterra import PotentialSpec

LAM = SpectralParameter(0.2, 1.5)


@pytest.fixture(name="kernel", scope="module")
def fixture_kernel():
    """one kernel for the linearized potential"""
    return GreenKernel.build(LAM, PotentialSpec.linearized())


def test_cutoff():
    """chi steps from 1 to 0 between the radii"""
    cutoff = CutoffSpec(delta0=0.5, delta1=0.25)
    assert np.allclose(cutoff.chi([0.0, 0.25, 0.5, 2.0]), [1.0, 1.0, 0.0, 0.0])
    assert cutoff.chi(0.375) == pytest.approx(0.5)
    assert np.max(np.abs(cutoff.derivative(np.linspace(0, 1, 1001)))) == pytest.approx(
        cutoff.max_derivative, rel=1e-6
    )
    with pytest.raises(DomainError):
        CutoffSpec(delta0=0.2, delta1=0.3)


def test_free_kernel_matches_free_pair():
    """G with V = 0 is G0"""
    free = GreenKernel.build(LAM, PotentialSpec.zero())
    rho = np.array([0.1, 0.4, 0.8, 0.6])
    s = np.array([0.3, 0.4, 0.2, 0.95])
    assert np.allclose(free.evaluate(rho, s), green_free_eval(rho, s, LAM), rtol=1e-8)


def test_reassembly(kernel):
    """G = G0 + sum of the six pieces"""
    rho, s = np.meshgrid(np.linspace(0.05, 0.95, 7), np.linspace(0.05, 0.95, 7))
    scale = np.max(np.abs(kernel.evaluate(rho, s)))
    assert np.max(kernel.reassembly_error(rho, s)) <= 1e-8 * scale


def test_piece_index():
    """there are six pieces"""
    kernel = GreenKernel.build(LAM, PotentialSpec.zero())
    with pytest.raises(DomainError):
        kernel.component(7, 0.3, 0.4)


@pytest.mark.parametrize("s", [0.3, 0.7])
def test_derivative_jump(kernel, s):
    """d/drho G jumps by -1/(1 - s^2) across the diagonal"""
    assert green_derivative_jump(kernel, s) == pytest.approx(-1 / (1 - s * s), rel=1e-5)


def _smooth_state(grid):
    return StatePair.from_functions(
        grid, lambda rho: np.exp(-(rho ** 2)), lambda rho: np.cos(2 * rho)
    )


def test_green_and_collocation_agree(kernel):
    """the two resolvent backends"""
    grid = RadialGrid(32)
    state = _smooth_state(grid)
    pot = PotentialSpec.linearized()
    green = resolvent_apply(state, LAM, pot, kernel=kernel).values
    direct = resolvent_apply(state, LAM, pot, backend="collocation").values
    assert np.linalg.norm(green - direct) <= 1e-6 * np.linalg.norm(direct)


def test_collocation_inverts_the_operator():
    """a manufactured right hand side is solved back"""
    grid = RadialGrid(24)
    pot = PotentialSpec.linearized()
    expected = np.cos(grid.nodes) + 0j
    rhs = collocation_operator(grid, LAM, pot) @ expected
    state = StatePair(RadialField.zeros(grid), RadialField(grid, rhs))
    assert np.allclose(bvp_solve_direct(state, LAM, pot).values, expected, rtol=1e-9)


def test_resolvent_set_guard():
    """the unstable eigenvalue is refused"""
    state = _smooth_state(RadialGrid(8))
    with pytest.raises(ResolventSetError):
        resolvent_apply(state, 1.0005, PotentialSpec.linearized())
    with pytest.raises(DomainError):
        resolvent_apply(state, LAM, PotentialSpec.linearized(), backend="spline")


def test_module_level_evaluators(kernel):
    """green_eval and green_component build the same kernel"""
    rho = np.array([0.2, 0.6, 0.9])
    s = np.array([0.7, 0.3, 0.5])
    pot = PotentialSpec.linearized()
    assert np.allclose(green_eval(rho, s, LAM, pot), kernel.evaluate(rho, s), rtol=1e-12)
    for n in (1, 4):
        assert np.allclose(
            green_component(n, rho, s, LAM, pot), kernel.component(n, rho, s), rtol=1e-12
        )


def test_resolvent_rhs():
    """F = (lambda + 5/2) f1 + rho f1' + f2 for f1 = rho^2, f2 = 1"""
    grid = RadialGrid(16)
    state = StatePair(
        RadialField(grid, grid.nodes ** 2), RadialField(grid, np.ones_like(grid.nodes))
    )
    rhs = resolvent_rhs(state, LAM)
    expected = (LAM.value + 4.5) * grid.nodes ** 2 + 1.0
    assert np.allclose(rhs.field.values, expected, rtol=1e-9, atol=1e-9)
    assert rhs.lam == LAM
