""" Green function of the spectral ODE and the resolvent

For rho <= s the Green function is u0(rho) u1(s) k(s) / (D w0), for rho >= s
the roles swap, with k(s) = s^4 (1 - s^2)^(lambda - 1/2) and
D = (3 - 2 lambda)(1 + 2 lambda)(1 - 2 lambda). The free kernel G0 uses
(phi0, phi1) and w0 = 1, and a smooth cutoff at rho <omega> splits G - G0 into
six pieces.
"""
import logging
import math

from dataclasses import dataclass
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from .coords import RadialField
from .coords import RadialGrid
from .coords import StatePair
from .errors import ConditioningError
from .errors import DomainError
from .errors import ResolventSetError
from .quadrature import Panel
from .quadrature import PanelGrid
from .quadrature import PanelMap
from .specfun import FreeSolutionKind
from .specfun import Lambda
from .specfun import SpectralParameter
from .specfun import as_parameter
from .specfun import free_fundamental
from .volterra import FundamentalPair
from .volterra import PotentialSpec
from .volterra import VolterraConfig
from .volterra import build_u_pair
from .volterra import endpoint_depth
from .volterra import require_nondegenerate

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# |w0| below this means lambda sits on the spectrum
W0_FLOOR = 1e-10

# the collocation solve is refused past this condition number
CONDITION_LIMIT = 1e13

RESOLVENT_ORDER = 24


@dataclass(frozen=True)
class CutoffSpec:
    """chi = 1 on [0, delta1], 0 on [delta0, inf), a quintic smoothstep in between"""

    delta0: float = 0.5
    delta1: float = 0.25

    def __post_init__(self):
        if not 0 < self.delta1 < self.delta0:
            raise DomainError(f"need 0 < delta1 < delta0, got {self.delta1}, {self.delta0}")

    @classmethod
    def from_config(cls, config: VolterraConfig) -> "CutoffSpec":
        """the cutoff on the matching radii"""
        return cls(delta0=config.delta0, delta1=config.delta1)

    def _unit(self, x: ArrayLike) -> np.ndarray:
        unit = (np.asarray(x, dtype=float) - self.delta1) / (self.delta0 - self.delta1)
        return np.clip(unit, 0.0, 1.0)

    def chi(self, x: ArrayLike) -> np.ndarray:
        """the cutoff"""
        t = self._unit(x)
        return 1 - t ** 3 * (10 - 15 * t + 6 * t ** 2)

    def derivative(self, x: ArrayLike) -> np.ndarray:
        """chi'"""
        t = self._unit(x)
        return -30 * t ** 2 * (1 - t) ** 2 / (self.delta0 - self.delta1)

    @property
    def max_derivative(self) -> float:
        """sup |chi'|, attained at the midpoint"""
        return 15.0 / 8.0 / (self.delta0 - self.delta1)


@dataclass(frozen=True)
class ResolventRHS:
    """F = (lambda + 5/2) f1 + rho f1' + f2"""

    field: RadialField
    lam: SpectralParameter


def resolvent_rhs(state: StatePair, lam: Lambda) -> ResolventRHS:
    """the data of the spectral ODE for (lambda - L) u = f"""
    lam = as_parameter(lam)
    grid = state.grid
    first = state.first.values
    values = (lam.value + 2.5) * first + grid.nodes * grid.derivative(first) + state.second.values
    return ResolventRHS(RadialField(grid, values), lam)


def _denominator(value: complex) -> complex:
    return (3 - 2 * value) * (1 + 2 * value) * (1 - 2 * value)


def _measure(s: np.ndarray, gap: np.ndarray, value: complex) -> np.ndarray:
    """s^4 (1 - s^2)^(lambda - 1/2)"""
    return s ** 4 * (gap * (1 + s)).astype(complex) ** (value - 0.5)


def _points(
    rho: ArrayLike, s: ArrayLike, rho_gap: Optional[ArrayLike], s_gap: Optional[ArrayLike]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, Tuple[int, ...]]:
    rho, s = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(s, dtype=float))
    shape = rho.shape
    rho_gap = 1 - rho if rho_gap is None else np.broadcast_to(rho_gap, shape)
    s_gap = 1 - s if s_gap is None else np.broadcast_to(s_gap, shape)
    flat = [np.array(np.ravel(item), dtype=float) for item in (rho, rho_gap, s, s_gap)]
    return flat[0], flat[1], flat[2], flat[3], shape


def _free(kind: FreeSolutionKind, x: np.ndarray, gap: np.ndarray, lam: SpectralParameter):
    return free_fundamental(kind, x, lam, 0, gap)


def green_free_eval(
    rho: ArrayLike,
    s: ArrayLike,
    lam: Lambda,
    rho_gap: Optional[ArrayLike] = None,
    s_gap: Optional[ArrayLike] = None,
) -> np.ndarray:
    """the free Green function G0(rho, s; lambda)

    :param rho: Output radii in (0, 1)
    :param s: Source radii in (0, 1)
    :param lam: The spectral parameter, off W(lambda) = 0
    :raises DegenerateSpectralParameterError: On the degenerate lines
    """
    lam = as_parameter(lam)
    require_nondegenerate(lam)
    rho, rho_gap, s, s_gap, shape = _points(rho, s, rho_gap, s_gap)
    small = np.minimum(rho, s)
    large = np.maximum(rho, s)
    small_gap = np.where(rho <= s, rho_gap, s_gap)
    large_gap = np.where(rho <= s, s_gap, rho_gap)
    values = (
        _free(FreeSolutionKind.PHI0, small, small_gap, lam)
        * _free(FreeSolutionKind.PHI1, large, large_gap, lam)
        * _measure(s, s_gap, lam.value)
        / _denominator(lam.value)
    )
    return np.reshape(values, shape)


class GreenKernel:
    """G and its six-piece decomposition for one spectral parameter

    :param pair: The perturbed fundamental system
    :type pair: FundamentalPair
    :param cutoff: The splitting cutoff
    :type cutoff: CutoffSpec
    """

    def __init__(self, pair: FundamentalPair, cutoff: Optional[CutoffSpec] = None):
        self.pair = pair
        self.lam = pair.lam
        self.pot = pair.pot
        self.cutoff = cutoff or CutoffSpec.from_config(pair.config)
        self.denominator = _denominator(self.lam.value)
        if abs(pair.w0) < W0_FLOOR:
            raise ResolventSetError(
                f"|w0| = {abs(pair.w0):.3e} at lambda = {self.lam.value}, on the spectrum"
            )

    def __repr__(self):
        return f"GreenKernel(lam={self.lam.value}, w0={self.pair.w0})"

    @classmethod
    def build(
        cls,
        lam: Lambda,
        pot: PotentialSpec,
        config: Optional[VolterraConfig] = None,
        cutoff: Optional[CutoffSpec] = None,
    ) -> "GreenKernel":
        """construct the fundamental pair and wrap it"""
        return cls(build_u_pair(lam, pot, config), cutoff)

    def _scale(self, s: np.ndarray, s_gap: np.ndarray) -> np.ndarray:
        return _measure(s, s_gap, self.lam.value) / self.denominator

    def evaluate(
        self,
        rho: ArrayLike,
        s: ArrayLike,
        rho_gap: Optional[ArrayLike] = None,
        s_gap: Optional[ArrayLike] = None,
    ) -> np.ndarray:
        """the full Green function"""
        rho, rho_gap, s, s_gap, shape = _points(rho, s, rho_gap, s_gap)
        lower = rho <= s
        small = np.where(lower, rho, s)
        large = np.where(lower, s, rho)
        small_gap = np.where(lower, rho_gap, s_gap)
        large_gap = np.where(lower, s_gap, rho_gap)
        values = (
            self.pair.u0(small, 0, small_gap)
            * self.pair.u1(large, 0, large_gap)
            * self._scale(s, s_gap)
            / self.pair.w0
        )
        return np.reshape(values, shape)

    def free(
        self,
        rho: ArrayLike,
        s: ArrayLike,
        rho_gap: Optional[ArrayLike] = None,
        s_gap: Optional[ArrayLike] = None,
    ) -> np.ndarray:
        """G0 at the same spectral parameter"""
        return green_free_eval(rho, s, self.lam, rho_gap, s_gap)

    def _piece(self, n: int, r, r_gap, s, s_gap) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(cutoff, leading product, numerator of gamma) on the region of piece n"""
        pair, lam, w0 = self.pair, self.lam, self.pair.w0
        if n <= 3:
            chi = self.cutoff.chi(r * lam.bracket)
        else:
            chi = self.cutoff.chi(s * lam.bracket)
        cut = chi if n in (1, 4) else 1 - chi
        lead = np.zeros(r.shape, dtype=complex)
        numerator = np.zeros(r.shape, dtype=complex)
        active = cut != 0
        if not np.any(active):
            return cut, lead, numerator
        r, r_gap, s, s_gap = r[active], r_gap[active], s[active], s_gap[active]
        phi1_r = _free(FreeSolutionKind.PHI1, r, r_gap, lam)
        phi1_s = _free(FreeSolutionKind.PHI1, s, s_gap, lam)
        if n == 1:
            lead_a = _free(FreeSolutionKind.PHI0, r, r_gap, lam) * phi1_s
            numer = pair.u0(r, 0, r_gap) * pair.u1(s, 0, s_gap) / w0 - lead_a
        elif n == 4:
            lead_a = phi1_r * _free(FreeSolutionKind.PHI0, s, s_gap, lam)
            numer = pair.u1(r, 0, r_gap) * pair.u0(s, 0, s_gap) / w0 - lead_a
        elif n in (2, 5):
            lead_a = phi1_r * phi1_s
            numer = pair.A * pair.u1(r, 0, r_gap) * pair.u1(s, 0, s_gap) / w0 - lead_a
        elif n == 3:
            lead_a = _free(FreeSolutionKind.PHI1_TILDE, r, r_gap, lam) * phi1_s
            numer = pair.B * pair.u1_tilde(r, 0, r_gap) * pair.u1(s, 0, s_gap) / w0 + lead_a
        else:
            lead_a = phi1_r * _free(FreeSolutionKind.PHI1_TILDE, s, s_gap, lam)
            numer = pair.B * pair.u1(r, 0, r_gap) * pair.u1_tilde(s, 0, s_gap) / w0 + lead_a
        lead[active] = lead_a
        numerator[active] = numer
        return cut, lead, numerator

    def _split(self, n: int, rho, s, rho_gap, s_gap):
        if n not in range(1, 7):
            raise DomainError(f"the Green function has pieces 1..6, not {n}")
        rho, rho_gap, s, s_gap, shape = _points(rho, s, rho_gap, s_gap)
        region = rho <= s if n <= 3 else rho > s
        return rho, rho_gap, s, s_gap, shape, region

    def component(
        self,
        n: int,
        rho: ArrayLike,
        s: ArrayLike,
        rho_gap: Optional[ArrayLike] = None,
        s_gap: Optional[ArrayLike] = None,
    ) -> np.ndarray:
        """G_n = cutoff k(s)/D (leading product) gamma_n, zero off its triangle"""
        rho, rho_gap, s, s_gap, shape, region = self._split(n, rho, s, rho_gap, s_gap)
        out = np.zeros(rho.shape, dtype=complex)
        if np.any(region):
            cut, _lead, numerator = self._piece(
                n, rho[region], rho_gap[region], s[region], s_gap[region]
            )
            out[region] = cut * self._scale(s[region], s_gap[region]) * numerator
        return np.reshape(out, shape)

    def gamma(
        self,
        n: int,
        rho: ArrayLike,
        s: ArrayLike,
        rho_gap: Optional[ArrayLike] = None,
        s_gap: Optional[ArrayLike] = None,
    ) -> np.ndarray:
        """the normalized remainder gamma_n, nan where piece n is switched off"""
        rho, rho_gap, s, s_gap, shape, region = self._split(n, rho, s, rho_gap, s_gap)
        out = np.full(rho.shape, np.nan, dtype=complex)
        if np.any(region):
            cut, lead, numerator = self._piece(
                n, rho[region], rho_gap[region], s[region], s_gap[region]
            )
            values = np.full(cut.shape, np.nan, dtype=complex)
            live = (cut != 0) & (lead != 0)
            values[live] = numerator[live] / lead[live]
            out[region] = values
        return np.reshape(out, shape)

    def reassembly_error(self, rho: ArrayLike, s: ArrayLike) -> np.ndarray:
        """|G - G0 - sum G_n|"""
        total = self.free(rho, s) + sum(self.component(n, rho, s) for n in range(1, 7))
        return np.abs(self.evaluate(rho, s) - total)


def green_eval(
    rho: ArrayLike, s: ArrayLike, lam: Lambda, pot: PotentialSpec, config=None
) -> np.ndarray:
    """the Green function with potential pot"""
    return GreenKernel.build(lam, pot, config).evaluate(rho, s)


def green_component(
    n: int, rho: ArrayLike, s: ArrayLike, lam: Lambda, pot: PotentialSpec, config=None
) -> np.ndarray:
    """piece n of G - G0"""
    return GreenKernel.build(lam, pot, config).component(n, rho, s)


def green_derivative_jump(kernel: GreenKernel, s: float, step: float = 1e-5) -> complex:
    """one-sided difference quotients of d/drho G across rho = s

    The ODE's leading coefficient -(1 - rho^2) makes the jump -1/(1 - s^2).
    """
    if not step < min(s, 1 - s):
        raise DomainError(f"step {step} does not fit inside (0, 1) around {s}")
    points = np.array([s - 2 * step, s - step, s, s + step, s + 2 * step])
    values = kernel.evaluate(points, np.full(points.shape, s))
    # second order one-sided differences
    left = (3 * values[2] - 4 * values[1] + values[0]) / (2 * step)
    right = (-3 * values[2] + 4 * values[3] - values[4]) / (2 * step)
    return complex(right - left)


def _resolvent_panels(nodes: np.ndarray, lam: SpectralParameter, order: int):
    """panels with breakpoints at every node, exp-mapped beyond rho = 1/2

    Returns the grid and, per node, the number of panels before it.
    """
    width = min(1.0, 3.0 / lam.bracket)
    panels = []
    boundaries = []
    edges = np.concatenate([[0.0], nodes])
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo >= 0.5:
            y_lo, y_hi = -math.log1p(-lo), -math.log1p(-hi)
            count = max(1, int(math.ceil((y_hi - y_lo) / width)))
            cuts = np.linspace(y_lo, y_hi, count + 1)
            panels.extend(Panel(PanelMap.EXP, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
        else:
            count = max(1, int(math.ceil((hi - lo) / min(0.1, width / 4))))
            cuts = np.linspace(lo, hi, count + 1)
            panels.extend(Panel(PanelMap.LINEAR, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
        boundaries.append(len(panels))
    y_last = -math.log1p(-nodes[-1])
    y_stop = max(endpoint_depth(lam), y_last + 1.0)
    count = max(1, int(math.ceil((y_stop - y_last) / width)))
    cuts = np.linspace(y_last, y_stop, count + 1)
    panels.extend(Panel(PanelMap.EXP, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
    return PanelGrid(panels, order), np.array(boundaries)


def _check_resolvent_set(
    lam: SpectralParameter, eigenvalues: Sequence[complex], guard: float
) -> None:
    for eigenvalue in eigenvalues:
        if abs(lam.value - complex(eigenvalue)) < guard:
            raise ResolventSetError(
                f"lambda = {lam.value} lies within {guard} of the eigenvalue {eigenvalue}"
            )


def _green_resolvent(kernel: GreenKernel, rhs: ResolventRHS) -> np.ndarray:
    grid = rhs.field.grid
    lam = rhs.lam
    quad, boundaries = _resolvent_panels(grid.nodes, lam, RESOLVENT_ORDER)
    s = quad.flat(quad.points)
    gap = quad.flat(quad.complements)
    data = grid.interpolate(rhs.field.values, s)
    measure = _measure(s, gap, lam.value)
    pair = kernel.pair
    left = quad.shaped(measure * pair.u0(s, 0, gap) * data)
    right = quad.shaped(measure * pair.u1(s, 0, gap) * data)
    left_totals = np.sum(quad.weights * left, axis=1)
    right_totals = np.sum(quad.weights * right, axis=1)
    below = np.concatenate([[0.0], np.cumsum(left_totals)])[boundaries]
    above = np.concatenate([np.cumsum(right_totals[::-1])[::-1], [0.0]])[boundaries]
    nodes = grid.nodes
    values = (pair.u1(nodes) * below + pair.u0(nodes) * above) / (
        kernel.denominator * pair.w0
    )
    logger.debug("green resolvent at lambda=%s on %s nodes", lam.value, quad.size)
    return values


def collocation_operator(grid: RadialGrid, lam: Lambda, pot: PotentialSpec) -> np.ndarray:
    """-(1 - rho^2) D^2 + (-4/rho + (2 lambda + 5) rho) D + (lambda + 5/2)(lambda + 3/2) + V"""
    value = as_parameter(lam).value
    rho = grid.nodes
    return (
        -(1 - rho ** 2)[:, None] * grid.second_differentiation_matrix
        + (-4 / rho + (2 * value + 5) * rho)[:, None] * grid.differentiation_matrix
        + np.diag((value + 2.5) * (value + 1.5) + pot(rho))
    )


def bvp_solve_direct(
    state: StatePair, lam: Lambda, pot: PotentialSpec, condition_limit: float = CONDITION_LIMIT
) -> RadialField:
    """the first component of R(lambda) f by collocation of the spectral ODE

    Only interior nodes carry equations; evenness of the basis gives
    regularity at 0 and the outflow boundary at 1 needs no row.

    :raises ConditioningError: When the collocation matrix is too ill-conditioned
    """
    lam = as_parameter(lam)
    rhs = resolvent_rhs(state, lam)
    matrix = collocation_operator(state.grid, lam, pot)
    condition = float(np.linalg.cond(matrix))
    if not condition < condition_limit:
        raise ConditioningError(
            f"collocation matrix at lambda = {lam.value} has condition {condition:.3e}",
            condition,
        )
    values = np.linalg.solve(matrix, rhs.field.values)
    logger.debug("collocation resolvent at lambda=%s, condition %.3e", lam.value, condition)
    return RadialField(state.grid, values)


def resolvent_apply(  # pylint: disable=too-many-arguments
    state: StatePair,
    lam: Lambda,
    pot: PotentialSpec,
    backend: str = "green",
    config: Optional[VolterraConfig] = None,
    kernel: Optional[GreenKernel] = None,
    eigenvalues: Sequence[complex] = (1.0,),
    guard: float = 1e-3,
) -> RadialField:
    """[R(lambda) f]_1 = int_0^1 G(rho, s; lambda) F(s) ds at the grid nodes

    :param state: The data f
    :type state: StatePair
    :param lam: The spectral parameter
    :param pot: The potential
    :param backend: 'green' for the Green function quadrature, 'collocation' for
        the direct solve
    :param kernel: A prebuilt kernel for lam
    :param eigenvalues: Known eigenvalues to keep away from
    :param guard: The exclusion radius around them
    :raises ResolventSetError: When lam is within guard of an eigenvalue
    :rtype: RadialField
    """
    lam = as_parameter(lam)
    _check_resolvent_set(lam, eigenvalues, guard)
    if backend == "collocation":
        return bvp_solve_direct(state, lam, pot)
    if backend != "green":
        raise DomainError(f"unknown resolvent backend {backend}")
    kernel = kernel or GreenKernel.build(lam, pot, config)
    return RadialField(state.grid, _green_resolvent(kernel, resolvent_rhs(state, lam)))
