""" tests for similarity coordinates, the grid and the norms
"""
import math

import numpy as np
import pytest

from blowup_lab.coords import C5
from blowup_lab.coords import ConeConfig
from blowup_lab.coords import FreeWaveSolution
from blowup_lab.coords import GaussianProfile
from blowup_lab.coords import NormSpec
from blowup_lab.coords import RadialField
from blowup_lab.coords import RadialGrid
from blowup_lab.coords import SimilarityPoint
from blowup_lab.coords import StatePair
from blowup_lab.coords import band_limited_state
from blowup_lab.coords import cone_strichartz_integral
from blowup_lab.coords import cylinder_strichartz_integral
from blowup_lab.coords import cylinder_to_cone
from blowup_lab.coords import energy_equivalence_envelope
from blowup_lab.coords import from_similarity
from blowup_lab.coords import gram_matrix
from blowup_lab.coords import inner_energy
from blowup_lab.coords import inner_h
from blowup_lab.coords import norm_h1
from blowup_lab.coords import norm_lq
from blowup_lab.coords import norm_state_H
from blowup_lab.coords import physical_to_cylinder
from blowup_lab.coords import to_similarity
from blowup_lab.errors import DomainError
from blowup_lab.errors import GridMismatchError
from blowup_lab.utils import seeded_generator


def test_c5_solves_the_profile_equation():
    """c5^(4/3) = 15/4"""
    assert C5 ** (4.0 / 3.0) == pytest.approx(15.0 / 4.0, rel=1e-14)


@pytest.mark.parametrize(
    "t, r",
    [(0.0, 0.0), (0.3, 0.2), (0.9, 0.1), (0.999, 0.001)],
    ids=["apex of the slice at t=0", "interior", "late", "close to blowup"],
)
def test_similarity_round_trip(t, r):
    """mapping to the cylinder and back is the identity"""
    cfg = ConeConfig(T=1.0)
    point = to_similarity(t, r, cfg)
    back_t, back_r = from_similarity(point, cfg)
    assert back_t == pytest.approx(t, abs=1e-14)
    assert back_r == pytest.approx(r, abs=1e-14)


def test_similarity_rejects_points_outside_the_cone():
    """r beyond T - t and t >= T are not on the cylinder"""
    cfg = ConeConfig(T=1.0)
    with pytest.raises(DomainError):
        to_similarity(0.5, 0.6, cfg)
    with pytest.raises(DomainError):
        to_similarity(1.0, 0.0, cfg)
    with pytest.raises(DomainError):
        SimilarityPoint(tau=-1.0, rho=0.5)


def test_cone_config_needs_positive_time():
    """a blowup time of 0 is invalid"""
    with pytest.raises(DomainError):
        ConeConfig(T=0.0)


@pytest.mark.parametrize("q", [10.0 / 3.0, 4.0, 5.0])
def test_admissible_pairs(q):
    """from_q lands on the admissible line"""
    spec = NormSpec.from_q(q)
    inv_p = 0.0 if math.isinf(spec.p) else 1.0 / spec.p
    assert inv_p + 5.0 / spec.q == pytest.approx(1.5)


def test_inadmissible_pair():
    """(2, 4) misses 1/p + 5/q = 3/2"""
    with pytest.raises(DomainError):
        NormSpec(p=2.0, q=4.0)


def test_grid_rejects_tiny_orders():
    """an order below 2 has no interior"""
    with pytest.raises(DomainError):
        RadialGrid(1)


def test_grid_integrates_even_polynomials_exactly():
    """int_0^1 rho^(2k) rho^4 d rho = 1 / (2k + 5)"""
    grid = RadialGrid(16)
    for power in (0, 2, 10, 30):
        assert grid.integrate(grid.nodes ** power).real == pytest.approx(1.0 / (power + 5))


def test_spectral_derivatives():
    """d/drho and d^2/drho^2 of cos(2 rho) at the nodes"""
    grid = RadialGrid(24)
    values = np.cos(2 * grid.nodes)
    assert np.allclose(grid.derivative(values), -2 * np.sin(2 * grid.nodes), atol=1e-10)
    assert np.allclose(grid.second_derivative(values), -4 * values, atol=1e-8)


def test_interpolation_and_boundary_value():
    """barycentric interpolation reaches rho = 1"""
    grid = RadialGrid(20)
    field = RadialField.from_function(grid, lambda rho: np.exp(-(rho ** 2)))
    assert np.allclose(field.at([0.0, 0.5]), [1.0, math.exp(-0.25)], rtol=0.0, atol=1e-12)
    assert grid.boundary_value(field.values).real == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_norms_of_constants():
    """||1||_L2 = ||1||_H1 = 5^(-1/2) and ||1||_L5 = 5^(-1/5)"""
    grid = RadialGrid(8)
    one = RadialField.from_function(grid, lambda rho: 1.0)
    assert norm_lq(one, 2.0) == pytest.approx(5 ** -0.5)
    assert norm_lq(one, 5.0) == pytest.approx(5 ** -0.2)
    assert norm_h1(one) == pytest.approx(5 ** -0.5)
    assert norm_lq(one, 2.0, R=0.5) == pytest.approx((0.5 ** 5 / 5) ** 0.5)


def test_norm_domain():
    """exponents below 1 and radii outside (0, 1] are rejected"""
    one = RadialField.from_function(RadialGrid(8), lambda rho: 1.0)
    with pytest.raises(DomainError):
        norm_lq(one, 0.5)
    with pytest.raises(DomainError):
        norm_lq(one, 2.0, R=1.5)


def test_gram_matrix_matches_the_norm():
    """f^H M f = ||f||_H^2 and inner_h is linear in its first argument"""
    grid = RadialGrid(16)
    rng = seeded_generator(3)
    state = band_limited_state(grid, rng)
    other = band_limited_state(grid, rng)
    vector = state.as_vector()
    assert (np.conj(vector) @ gram_matrix(grid) @ vector).real == pytest.approx(
        norm_state_H(state) ** 2
    )
    assert inner_h(state * 2j, other) == pytest.approx(2j * inner_h(state, other))


def test_grid_mismatch():
    """fields on different grids do not combine"""
    first = RadialField.zeros(RadialGrid(8))
    second = RadialField.zeros(RadialGrid(10))
    with pytest.raises(GridMismatchError):
        _sum = first + second
    with pytest.raises(GridMismatchError):
        StatePair(first, second)
    with pytest.raises(GridMismatchError):
        RadialField(RadialGrid(8), np.zeros(3))


def test_state_vector_round_trip():
    """from_vector undoes as_vector"""
    grid = RadialGrid(8)
    state = band_limited_state(grid, seeded_generator(1))
    again = StatePair.from_vector(grid, state.as_vector())
    assert np.array_equal(again.as_vector(), state.as_vector())


def test_energy_envelope_is_positive():
    """the energy and H norms are equivalent on smooth data"""
    grid = RadialGrid(24)
    rng = seeded_generator(5)
    low, high = energy_equivalence_envelope(band_limited_state(grid, rng) for _ in range(8))
    assert 0 < low <= high < math.inf


def _psi(tau, rho):
    return C5 + np.exp(-tau) * np.cos(np.pi * np.asarray(rho) / 2)


def test_strichartz_change_of_variables():
    """the cylinder and cone integrals agree"""
    grid = RadialGrid(24)
    cfg = ConeConfig(T=1.0)
    tau_max = 2.0
    cylinder = cylinder_strichartz_integral(_psi, tau_max, grid)
    t_max = cfg.T * (1 - math.exp(-tau_max))
    cone = cone_strichartz_integral(cylinder_to_cone(_psi, cfg), cfg, t_max, grid)
    assert cone == pytest.approx(cylinder, rel=1e-8)


def test_strichartz_vanishes_on_the_blowup_profile():
    """psi = c5 has no deviation"""
    grid = RadialGrid(8)
    assert cylinder_strichartz_integral(lambda tau, rho: C5 + 0 * rho, 1.0, grid) == 0.0


def test_inner_energy_of_constants():
    """the boundary term carries the constant, the bulk the second component"""
    grid = RadialGrid(8)
    one = RadialField.from_function(grid, lambda rho: 1.0)
    zero = RadialField.from_function(grid, lambda rho: 0.0)
    assert inner_energy(StatePair(one, zero), StatePair(one, zero)) == pytest.approx(1.0)
    assert inner_energy(StatePair(zero, one), StatePair(zero, one)) == pytest.approx(0.2)


def test_physical_to_cylinder_weights():
    """psi1 = (T - t)^(3/2) u and psi2 = (T - t)^(5/2) u_t"""
    grid = RadialGrid(8)
    one = RadialField.from_function(grid, lambda rho: 1.0)
    state = physical_to_cylinder(one, one * 2.0, math.log(2.0), ConeConfig(T=1.0))
    assert np.allclose(state.first.values, 0.5 ** 1.5)
    assert np.allclose(state.second.values, 2.0 * 0.5 ** 2.5)
    with pytest.raises(DomainError):
        physical_to_cylinder(one, one, -0.1, ConeConfig(T=1.0))


@pytest.mark.parametrize("t, r", [(0.3, 0.4), (-0.2, 0.9), (0.1, 0.05)])
def test_free_wave_solution_solves_the_wave_equation(t, r):
    """u_tt = u_rr + 4 u_r / r by finite differences"""
    solution = FreeWaveSolution(GaussianProfile(amplitude=1.0, center=0.1, width=0.5))
    step = 1e-3

    def u(time, radius):
        return float(solution(time, radius)[0])

    u_tt = (u(t + step, r) - 2 * u(t, r) + u(t - step, r)) / step ** 2
    u_rr = (u(t, r + step) - 2 * u(t, r) + u(t, r - step)) / step ** 2
    u_r = (u(t, r + step) - u(t, r - step)) / (2 * step)
    scale = abs(u_tt) + abs(u_rr) + abs(4 * u_r / r)
    assert abs(u_tt - u_rr - 4 * u_r / r) <= 1e-4 * scale


def test_free_wave_solution_series_branch():
    """the small radius series joins the closed form"""
    solution = FreeWaveSolution(GaussianProfile(width=0.5))
    edge = 0.05 * 0.5
    inside, outside = solution(0.2, [edge * (1 - 1e-6), edge * (1 + 1e-6)])
    assert inside == pytest.approx(outside, rel=1e-6)
    derivative = solution.time_derivative()
    assert np.isfinite(derivative(0.2, [0.0, 0.3])).all()
