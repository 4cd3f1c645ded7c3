""" Volterra equations and the perturbed fundamental system

After the transform v = rho^2 (1 - rho^2)^(1/4 + lambda/2) u the spectral ODE
with potential V has no first order term,

    v'' + Q0(rho; lambda) v = V(rho) v / (1 - rho^2),

and the free solutions psi0, psi1, psi1~ are known in closed form. The
solutions of the perturbed problem that are regular at rho = 0 (v0) and at
rho = 1 (v1) follow from variation of constants as Volterra equations for
h = v / psi, solved here by Nystrom on Gauss-Legendre panels.
"""
import logging
import math

from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from functools import cached_property
from typing import Callable
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from scipy import integrate
from scipy import linalg

from .errors import ConfigError
from .errors import DegenerateSpectralParameterError
from .errors import DomainError
from .errors import KernelIntegrabilityError
from .errors import MatchingError
from .errors import VolterraConvergenceError
from .errors import WronskianInvariantError
from .quadrature import PANEL_ORDER
from .quadrature import PanelGrid
from .quadrature import endpoint_exp_grid
from .quadrature import geometric_log_grid
from .specfun import FreeSolutionKind
from .specfun import Lambda
from .specfun import SpectralParameter
from .specfun import as_parameter
from .specfun import free_fundamental
from .specfun import transform_weight
from .specfun import wronskian_free

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# 7/3 * 15/4, the linearization of |u|^(4/3) u at the ODE blowup
LINEARIZED_POTENTIAL = -35.0 / 4.0

# |W(lambda)| below this is treated as a degenerate line
DEGENERATE_WRONSKIAN = 1e-8

# the Wronskian invariant is sampled here
WRONSKIAN_CHECK_POINTS = np.linspace(0.05, 0.95, 9)


class PotentialSpec:
    """the potential V on [0, 1] and a1(rho) = -int_rho^1 V

    :param func: Vectorized V
    :type func: callable
    :param constant: The value when V is constant
    :type constant: float
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], constant: Optional[float] = None):
        self._func = func
        self.constant = constant

    def __repr__(self):
        if self.constant is not None:
            return f"PotentialSpec(constant={self.constant})"
        return f"PotentialSpec(func={self._func!r})"

    @classmethod
    def linearized(cls) -> "PotentialSpec":
        """V = -35/4"""
        return cls.constant_value(LINEARIZED_POTENTIAL)

    @classmethod
    def zero(cls) -> "PotentialSpec":
        """V = 0, the free problem"""
        return cls.constant_value(0.0)

    @classmethod
    def constant_value(cls, value: float) -> "PotentialSpec":
        """a constant potential"""
        return cls(lambda rho: np.full(np.shape(rho), float(value)), constant=float(value))

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray]) -> "PotentialSpec":
        """any smooth V, evaluated on arrays"""
        samples = np.asarray(func(np.linspace(0.0, 1.0, 33)), dtype=float)
        if samples.shape != (33,) or not np.all(np.isfinite(samples)):
            raise DomainError("the potential must be finite and vectorized on [0, 1]")
        return cls(func)

    @property
    def is_zero(self) -> bool:
        """whether V vanishes identically"""
        return self.constant == 0.0

    def __call__(self, rho: ArrayLike) -> np.ndarray:
        return np.asarray(self._func(np.asarray(rho, dtype=float)), dtype=float)

    def a1(self, rho: ArrayLike) -> np.ndarray:
        """-int_rho^1 V(s) ds"""
        rho = np.asarray(rho, dtype=float)
        if self.constant is not None:
            return -self.constant * (1 - rho)
        flat = np.atleast_1d(rho)
        values = np.array(
            [
                -integrate.quad(lambda s: float(self._func(np.array([s]))[0]), x, 1.0)[0]
                for x in flat
            ]
        )
        return values.reshape(rho.shape) if rho.ndim else values[0]


class Orientation(Enum):
    """which end the integral starts from"""

    FORWARD = "forward"
    BACKWARD = "backward"


# a kernel factor evaluated at points s with complements 1 - s
Factor = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SeparableTerm:
    """one term outer(x) inner(y) of a separable kernel"""

    outer: Factor
    inner: Factor


def _one(points: np.ndarray, _complements: Optional[np.ndarray] = None) -> np.ndarray:
    return np.ones_like(points, dtype=complex)


@dataclass
class VolterraProblem:
    """h(x) = f(x) + int K(x, y) h(y) dy with the integral from one end of the grid to x

    The kernel is either a dense evaluator ``kernel(x, y)`` broadcasting over
    arrays or a list of separable terms.
    """

    grid: PanelGrid
    orientation: Orientation = Orientation.FORWARD
    kernel: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    terms: Sequence[SeparableTerm] = ()
    inhomogeneity: Factor = _one

    def __post_init__(self):
        self.orientation = Orientation(self.orientation)
        if (self.kernel is None) == (not self.terms):
            raise DomainError("give either a dense kernel or separable terms")

    @property
    def separable(self) -> bool:
        """whether the kernel is given as separable terms"""
        return self.kernel is None

    def _flat_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.grid.flat(self.grid.points), self.grid.flat(self.grid.complements)

    def kernel_matrix(self) -> np.ndarray:
        """K at all node pairs"""
        x, t = self._flat_nodes()
        if self.kernel is not None:
            return np.asarray(self.kernel(x[:, None], x[None, :]), dtype=complex)
        return sum(
            term.outer(x, t)[:, None] * term.inner(x, t)[None, :] for term in self.terms
        )

    def kernel_bound(self) -> float:
        """int sup_x |K(x, y)| dy over the pairs the integral actually reaches"""
        weights = np.abs(self.grid.flat(self.grid.weights))
        x, t = self._flat_nodes()
        if self.separable:
            total = 0.0
            for term in self.terms:
                outer = np.abs(term.outer(x, t))
                if self.orientation is Orientation.FORWARD:
                    reach = np.maximum.accumulate(outer[::-1])[::-1]
                else:
                    reach = np.maximum.accumulate(outer)
                total += float(np.sum(weights * reach * np.abs(term.inner(x, t))))
            return total
        magnitude = np.abs(self.kernel_matrix())
        if self.orientation is Orientation.FORWARD:
            mask = x[:, None] >= x[None, :]
        else:
            mask = x[:, None] <= x[None, :]
        return float(np.sum(weights * np.max(np.where(mask, magnitude, 0.0), axis=0)))

    def check_integrability(self) -> float:
        """the kernel bound, or KernelIntegrabilityError when it is not finite"""
        bound = self.kernel_bound()
        if not math.isfinite(bound):
            raise KernelIntegrabilityError(
                f"int sup |K| dy is not finite on a grid of {self.grid.size} nodes"
            )
        logger.debug("kernel bound %.6e on %s", bound, self.grid)
        return bound


@dataclass
class VolterraSolution:
    """the nodal solution and, for separable kernels, the running moments int b_k h"""

    problem: VolterraProblem
    values: np.ndarray
    moments: Optional[np.ndarray]
    iterations: int
    residual: float
    method: str

    def inhomogeneity(self) -> np.ndarray:
        """f at the nodes"""
        x, t = self.problem._flat_nodes()  # pylint: disable=protected-access
        return np.asarray(self.problem.inhomogeneity(x, t), dtype=complex)

    def deviation(self) -> np.ndarray:
        """h - f at the nodes"""
        return self.values - self.inhomogeneity()

    @cached_property
    def integrands(self) -> List[np.ndarray]:
        """b_k h at the nodes"""
        nodes, comps = self.problem._flat_nodes()  # pylint: disable=protected-access
        return [term.inner(nodes, comps) * self.values for term in self.problem.terms]

    def moment(self, index: int, x: ArrayLike, complement: Optional[ArrayLike] = None):
        """int b_k h from the starting end of the grid to x"""
        if not self.problem.separable:
            raise DomainError("moments exist only for separable kernels")
        grid = self.problem.grid
        integrand = self.integrands[index]
        return grid.antiderivative(
            integrand,
            x,
            backward=self.problem.orientation is Orientation.BACKWARD,
            complement=complement,
        )

    def __call__(self, x: ArrayLike, complement: Optional[ArrayLike] = None) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if not self.problem.separable:
            return self.problem.grid.interpolate(self.values, x, complement=complement)
        comps = 1.0 - x if complement is None else np.atleast_1d(complement)
        out = np.asarray(self.problem.inhomogeneity(x, comps), dtype=complex)
        for index, term in enumerate(self.problem.terms):
            out = out + term.outer(x, comps) * self.moment(index, x, complement)
        return out


def _separable_apply(problem: VolterraProblem, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    grid = problem.grid
    x, t = problem._flat_nodes()  # pylint: disable=protected-access
    backward = problem.orientation is Orientation.BACKWARD
    moments = np.array(
        [grid.flat(grid.cumulative(term.inner(x, t) * values, backward)) for term in problem.terms]
    )
    applied = sum(term.outer(x, t) * moments[k] for k, term in enumerate(problem.terms))
    return applied, moments


def _nystrom_matrix(problem: VolterraProblem) -> np.ndarray:
    """the discrete operator of a dense kernel"""
    grid = problem.grid
    kernel = problem.kernel_matrix()
    order = grid.order
    count = len(grid.panels)
    matrix = np.zeros_like(kernel)
    weights = grid.flat(grid.weights)
    for index in range(count):
        rows = slice(index * order, (index + 1) * order)
        if problem.orientation is Orientation.FORWARD:
            others = slice(0, index * order)
            local = grid.local_forward(index)
        else:
            others = slice((index + 1) * order, count * order)
            local = grid.local_backward(index)
        matrix[rows, others] = kernel[rows, others] * weights[None, others]
        matrix[rows, rows] = kernel[rows, rows] * local
    return matrix


def _march_separable(problem: VolterraProblem, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    grid = problem.grid
    x, t = problem._flat_nodes()  # pylint: disable=protected-access
    outer = np.array([grid.shaped(term.outer(x, t)) for term in problem.terms])
    inner = np.array([grid.shaped(term.inner(x, t)) for term in problem.terms])
    rhs = grid.shaped(rhs)
    count, order = rhs.shape
    values = np.empty((count, order), dtype=complex)
    moments = np.empty((len(problem.terms), count, order), dtype=complex)
    carried = np.zeros(len(problem.terms), dtype=complex)
    identity = np.eye(order)
    backward = problem.orientation is Orientation.BACKWARD
    sequence = range(count - 1, -1, -1) if backward else range(count)
    for index in sequence:
        local = grid.local_backward(index) if backward else grid.local_forward(index)
        block = sum(
            outer[k, index][:, None] * local * inner[k, index][None, :]
            for k in range(len(problem.terms))
        )
        right = rhs[index] + np.einsum("k,ki->i", carried, outer[:, index])
        panel_values = linalg.solve(identity - block, right)
        values[index] = panel_values
        for k in range(len(problem.terms)):
            weighted = inner[k, index] * panel_values
            moments[k, index] = carried[k] + local @ weighted
            carried[k] += np.sum(grid.weights[index] * weighted)
    return grid.flat(values), moments.reshape(len(problem.terms), -1)


def _march_dense(problem: VolterraProblem, rhs: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    grid = problem.grid
    order = grid.order
    count = len(grid.panels)
    values = np.zeros(grid.size, dtype=complex)
    identity = np.eye(order)
    backward = problem.orientation is Orientation.BACKWARD
    sequence = range(count - 1, -1, -1) if backward else range(count)
    for index in sequence:
        rows = slice(index * order, (index + 1) * order)
        right = rhs[rows] + matrix[rows] @ values
        values[rows] = linalg.solve(identity - matrix[rows, rows], right)
    return values


def volterra_solve(
    problem: VolterraProblem, tol: float = 1e-12, max_iter: int = 50, method: str = "march"
) -> VolterraSolution:
    """solve the discretized Volterra equation

    ``picard`` iterates h <- f + K h until the sup-change drops below tol.
    ``march`` eliminates the lower triangular discrete system panel by panel,
    which is the limit of the same iteration.

    :param problem: The equation
    :type problem: VolterraProblem
    :param tol: Stopping tolerance of the iteration, relative to sup |h|
    :type tol: float
    :param max_iter: Iteration cap
    :type max_iter: int
    :param method: 'march' or 'picard'
    :type method: str
    :raises VolterraConvergenceError: When picard does not settle within max_iter
    :rtype: VolterraSolution
    """
    if method not in ("march", "picard"):
        raise DomainError(f"unknown Volterra method {method}")
    problem.check_integrability()
    x, t = problem._flat_nodes()  # pylint: disable=protected-access
    rhs = np.asarray(problem.inhomogeneity(x, t), dtype=complex)
    matrix = None if problem.separable else _nystrom_matrix(problem)

    def apply(values: np.ndarray) -> np.ndarray:
        if matrix is None:
            return _separable_apply(problem, values)[0]
        return matrix @ values

    iterations = 0
    if method == "march":
        if matrix is None:
            values, _moments = _march_separable(problem, rhs)
        else:
            values = _march_dense(problem, rhs, matrix)
    else:
        values = rhs.copy()
        while True:
            updated = rhs + apply(values)
            iterations += 1
            change = float(np.max(np.abs(updated - values)))
            values = updated
            if change <= tol * max(1.0, float(np.max(np.abs(values)))):
                break
            if iterations >= max_iter:
                raise VolterraConvergenceError(
                    f"picard iteration stalled at change {change:.3e} after {iterations} steps"
                )
    residual = float(np.max(np.abs(values - rhs - apply(values))))
    moments = _separable_apply(problem, values)[1] if matrix is None else None
    logger.debug(
        "volterra %s on %s nodes: %s iterations, residual %.3e",
        method,
        values.size,
        iterations,
        residual,
    )
    return VolterraSolution(problem, values, moments, iterations, residual, method)


def require_nondegenerate(lam: SpectralParameter) -> complex:
    wronskian = wronskian_free(lam)
    if abs(wronskian) < DEGENERATE_WRONSKIAN:
        raise DegenerateSpectralParameterError(
            f"W(lambda) = {wronskian:.3e} vanishes at lambda = {lam.value}"
        )
    return wronskian


def _note_strip(lam: SpectralParameter) -> None:
    if not lam.in_working_strip():
        logger.debug("lambda = %s lies outside 0 <= Re lambda <= 1/4", lam.value)


def v_potential(rho: ArrayLike, lam: Lambda) -> np.ndarray:
    """Q0 in v'' + Q0 v - V v / (1 - rho^2) = 0"""
    value = as_parameter(lam).value
    rho = np.asarray(rho, dtype=float)
    gap = 1 - rho ** 2
    slope = 4 / rho - (2 * value + 1) * rho / gap
    d_slope = -4 / rho ** 2 - (2 * value + 1) * (1 + rho ** 2) / gap ** 2
    return -(value + 2.5) * (value + 1.5) / gap - d_slope / 2 - slope ** 2 / 4


def v_equation_residual(
    values: ArrayLike, second: ArrayLike, rho: ArrayLike, lam: Lambda, pot: PotentialSpec
) -> np.ndarray:
    """v'' + Q0 v - V v / (1 - rho^2)"""
    rho = np.asarray(rho, dtype=float)
    values = np.asarray(values)
    return (
        np.asarray(second) + v_potential(rho, lam) * values - pot(rho) * values / (1 - rho ** 2)
    )


@dataclass(frozen=True)
class VolterraConfig:  # pylint: disable=too-many-instance-attributes
    """the numerical choices behind a FundamentalPair"""

    delta0: float = 0.5
    delta1: float = 0.25
    tol: float = 1e-12
    max_iter: int = 50
    method: str = "march"
    wronskian_tol: float = 1e-6
    depth: float = 27.6
    order: int = PANEL_ORDER

    def __post_init__(self):
        if not 0 < self.delta1 < self.delta0 <= 0.5:
            raise ConfigError(
                f"need 0 < delta1 < delta0 <= 1/2, got delta0={self.delta0}, delta1={self.delta1}"
            )
        if self.method not in ("march", "picard"):
            raise ConfigError(f"unknown Volterra method {self.method}")
        if self.order < 4:
            raise ConfigError(f"panel order {self.order} is too small")

    def radii(self, lam: SpectralParameter) -> Tuple[float, float]:
        """(delta0 / <omega>, delta1 / <omega>)"""
        return self.delta0 / lam.bracket, self.delta1 / lam.bracket


def _weight(pot: PotentialSpec, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """V / (1 - s^2)"""
    return pot(s) / (t * (1 + s))


@dataclass
class PerturbedSolution:
    """v = psi (1 + correction) on the range of its Volterra grid

    ``kind`` is 'v0' for the solution regular at 0, built forwards, and 'v1'
    for the one regular at 1, built backwards.
    """

    kind: str
    lam: SpectralParameter
    pot: PotentialSpec
    solution: VolterraSolution
    wronskian: complex

    @property
    def grid(self) -> PanelGrid:
        """the Volterra grid"""
        return self.solution.problem.grid

    def _moments(self, rho: np.ndarray, gap: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        first = np.zeros(rho.shape, dtype=complex)
        second = np.zeros(rho.shape, dtype=complex)
        if self.kind == "v0":
            inside = rho >= self.grid.start
        else:
            # past the last panel the backward integrals are below round-off
            inside = gap >= self.grid.stop_complement
        if np.any(inside):
            first[inside] = self.solution.moment(0, rho[inside], gap[inside])
            second[inside] = self.solution.moment(1, rho[inside], gap[inside])
        return first, second

    def _free(self, rho: np.ndarray, gap: np.ndarray, derivative: int):
        if self.kind == "v0":
            regular, other = FreeSolutionKind.PSI0, FreeSolutionKind.PSI1
        else:
            regular, other = FreeSolutionKind.PSI1, FreeSolutionKind.PSI1_TILDE
        return (
            free_fundamental(regular, rho, self.lam, derivative, gap),
            free_fundamental(other, rho, self.lam, derivative, gap),
        )

    def __call__(
        self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None
    ) -> np.ndarray:
        if derivative not in (0, 1):
            raise DomainError(f"derivative order {derivative} is not supported")
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        gap = 1 - rho if complement is None else np.atleast_1d(np.asarray(complement, float))
        self._check_domain(rho)
        first, second = self._moments(rho, gap)
        regular, other = self._free(rho, gap, derivative)
        if self.kind == "v0":
            # psi0 + (psi1 J1 - psi0 J2) / W
            return regular + (other * first - regular * second) / self.wronskian
        # psi1 + (psi1 I1 - psi1~ I2) / W
        return regular + (regular * first - other * second) / self.wronskian

    def _check_domain(self, rho: np.ndarray) -> None:
        tol = 1e-12
        if self.kind == "v0" and np.any(rho > self.grid.stop * (1 + tol)):
            raise DomainError(f"v0 is built on (0, {self.grid.stop}] only")
        if self.kind == "v1" and np.any(rho < self.grid.start * (1 - tol)):
            raise DomainError(f"v1 is built on [{self.grid.start}, 1) only")

    def h(self, rho: ArrayLike, complement: Optional[ArrayLike] = None) -> np.ndarray:
        """v / psi"""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        gap = None if complement is None else np.atleast_1d(complement)
        regular = FreeSolutionKind.PSI0 if self.kind == "v0" else FreeSolutionKind.PSI1
        return self(rho, 0, gap) / free_fundamental(regular, rho, self.lam, 0, gap)

    def deviation(self) -> Tuple[np.ndarray, np.ndarray]:
        """the nodes and h - 1 there"""
        return self.grid.flat(self.grid.points), self.solution.deviation()


def _v0_terms(lam: SpectralParameter, pot: PotentialSpec, wronskian: complex):
    def psi0(s, t):
        return free_fundamental(FreeSolutionKind.PSI0, s, lam, 0, t)

    def psi1(s, t):
        return free_fundamental(FreeSolutionKind.PSI1, s, lam, 0, t)

    return [
        SeparableTerm(
            outer=lambda s, t: psi1(s, t) / (wronskian * psi0(s, t)),
            inner=lambda s, t: psi0(s, t) ** 2 * _weight(pot, s, t),
        ),
        SeparableTerm(
            outer=lambda s, t: np.full(np.shape(s), -1.0 / wronskian, dtype=complex),
            inner=lambda s, t: psi0(s, t) * psi1(s, t) * _weight(pot, s, t),
        ),
    ]


def _v1_terms(lam: SpectralParameter, pot: PotentialSpec, wronskian: complex):
    value = lam.value

    def psi1(s, t):
        return free_fundamental(FreeSolutionKind.PSI1, s, lam, 0, t)

    def ratio(s, t):
        return free_fundamental(FreeSolutionKind.PSI1_TILDE, s, lam, 0, t) / psi1(s, t)

    return [
        SeparableTerm(
            outer=lambda s, t: np.full(np.shape(s), 1.0 / wronskian, dtype=complex),
            # psi1 psi1~ / (1 - s^2) = (4 - (1 - 2 lambda)^2 s^2) / s^2
            inner=lambda s, t: pot(s) * (4 - s ** 2 * (1 - 2 * value) ** 2) / s ** 2,
        ),
        SeparableTerm(
            outer=lambda s, t: -ratio(s, t) / wronskian,
            inner=lambda s, t: psi1(s, t) ** 2 * _weight(pot, s, t),
        ),
    ]


def build_v0(
    lam: Lambda, pot: PotentialSpec, config: Optional[VolterraConfig] = None
) -> PerturbedSolution:
    """the solution regular at rho = 0 on (0, delta0 / <omega>]

    :param lam: The spectral parameter
    :param pot: The potential
    :param config: Radii and solver settings
    :raises DegenerateSpectralParameterError: On the lines W(lambda) = 0
    :rtype: PerturbedSolution
    """
    config = config or VolterraConfig()
    lam = as_parameter(lam)
    _note_strip(lam)
    wronskian = require_nondegenerate(lam)
    stop, _inner = config.radii(lam)
    grid = geometric_log_grid(stop * math.exp(-config.depth), stop, 1.0, config.order)
    problem = VolterraProblem(grid, Orientation.FORWARD, terms=_v0_terms(lam, pot, wronskian))
    solution = volterra_solve(problem, config.tol, config.max_iter, config.method)
    logger.debug("v0 at lambda=%s: sup |h0 - 1| = %.3e", lam.value, _sup(solution.deviation()))
    return PerturbedSolution("v0", lam, pot, solution, wronskian)


def _sup(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if np.size(values) else 0.0


def endpoint_depth(lam: SpectralParameter) -> float:
    """y with exp(-(1/2 + eps) y) = 1e-17, where the tail of the backward integrals ends"""
    if lam.eps <= -0.5:
        raise DomainError(f"the endpoint weight is not integrable for Re lambda = {lam.eps}")
    return 17 * math.log(10) / (0.5 + lam.eps)


def build_v1(
    lam: Lambda, pot: PotentialSpec, config: Optional[VolterraConfig] = None
) -> PerturbedSolution:
    """the solution regular at rho = 1 on [delta1 / <omega>, 1)

    Panels are logarithmic up to rho = 1/2 and of the form 1 - exp(-y)
    beyond, narrow enough to resolve (1 - rho)^(i omega / 2).
    """
    config = config or VolterraConfig()
    lam = as_parameter(lam)
    _note_strip(lam)
    wronskian = require_nondegenerate(lam)
    _outer, start = config.radii(lam)
    width = min(1.0, 3.0 / max(abs(lam.omega), 1e-300))
    depth = endpoint_depth(lam)
    pieces: List[PanelGrid] = []
    if start < 0.5:
        pieces.append(geometric_log_grid(start, 0.5, width, config.order))
        pieces.append(endpoint_exp_grid(0.5, depth, width, config.order))
    else:
        pieces.append(endpoint_exp_grid(start, depth, width, config.order))
    grid = PanelGrid.concatenate(pieces)
    problem = VolterraProblem(grid, Orientation.BACKWARD, terms=_v1_terms(lam, pot, wronskian))
    solution = volterra_solve(problem, config.tol, config.max_iter, config.method)
    logger.debug(
        "v1 at lambda=%s on %s panels: sup |h1 - 1| = %.3e",
        lam.value,
        len(grid.panels),
        _sup(solution.deviation()),
    )
    return PerturbedSolution("v1", lam, pot, solution, wronskian)


def h1_leading(rho: ArrayLike, lam: Lambda, pot: PotentialSpec) -> np.ndarray:
    """1 - (1 - 2 lambda) a1(rho) / ((3 - 2 lambda)(1 + 2 lambda))"""
    value = as_parameter(lam).value
    return 1 - (1 - 2 * value) * pot.a1(rho) / ((3 - 2 * value) * (1 + 2 * value))


def _wronskian(f0, f0p, f1, f1p):
    return f0 * f1p - f0p * f1


@dataclass
class FundamentalPair:  # pylint: disable=too-many-instance-attributes
    """u0 regular at rho = 0 and u1 regular at rho = 1, on all of (0, 1)

    v1 reaches below delta1/<omega> through (v0, v0~) and v0 reaches above
    delta0/<omega> through (v1, v1~), with Wronskian matching at
    rho_m = delta0/<omega>.
    """

    lam: SpectralParameter
    pot: PotentialSpec
    config: VolterraConfig
    branch0: PerturbedSolution
    branch1: PerturbedSolution
    branch1_tilde: PerturbedSolution
    matching_radii: Tuple[float, float] = (0.0, 0.0)
    w0: complex = 0j
    coefficients: dict = field(default_factory=dict)
    _inverse_square: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.matching_radii = self.config.radii(self.lam)
        self._setup_v0_tilde()
        self._match()

    def _setup_v0_tilde(self) -> None:
        grid = self.branch0.grid
        nodes = grid.flat(grid.points)
        values = self.branch0(nodes)
        if np.min(np.abs(values)) == 0:
            raise MatchingError(f"v0 vanishes on its grid at lambda = {self.lam.value}")
        self._inverse_square = values ** -2.0

    def _match(self) -> None:
        rho_m = np.array([self.matching_radii[0]])
        v0, v0p = self.branch0(rho_m), self.branch0(rho_m, 1)
        v1, v1p = self.branch1(rho_m), self.branch1(rho_m, 1)
        t1, t1p = self.branch1_tilde(rho_m), self.branch1_tilde(rho_m, 1)
        if abs(v0[0]) < 1e-14 * max(abs(v0p[0]) * rho_m[0], 1e-300):
            raise MatchingError(f"v0 nearly vanishes at the matching radius {rho_m[0]:.3e}")
        cross = complex(_wronskian(v1, v1p, t1, t1p)[0])
        if abs(cross) < 1e-12 * abs(self.branch1.wronskian):
            raise MatchingError(
                f"W(v1, v1~) = {cross:.3e} is nearly singular at lambda = {self.lam.value}"
            )
        w01 = complex(_wronskian(v0, v0p, v1, v1p)[0])
        self.coefficients = {
            # v1 = a v0 + b v0~ below the matching radius
            "a": complex(v1[0] / v0[0]),
            "b": complex(_wronskian(v1, v1p, v0, v0p)[0]),
            # v0 = A v1 + B v1~ above it
            "A": complex(_wronskian(v0, v0p, t1, t1p)[0]) / cross,
            "B": -w01 / cross,
            "W11": cross,
        }
        self.w0 = w01 / self.branch1.wronskian
        logger.debug("pair at lambda=%s: w0=%s, W(v1, v1~)=%s", self.lam.value, self.w0, cross)

    @property
    def A(self) -> complex:  # pylint: disable=invalid-name
        """coefficient of v1 in v0 on the outer region"""
        return self.coefficients["A"]

    @property
    def B(self) -> complex:  # pylint: disable=invalid-name
        """coefficient of v1~ in v0 on the outer region"""
        return self.coefficients["B"]

    @property
    def a(self) -> complex:
        """coefficient of v0 in v1 on the inner region"""
        return self.coefficients["a"]

    @property
    def b(self) -> complex:
        """coefficient of v0~ in v1 on the inner region"""
        return self.coefficients["b"]

    def _split(self, rho, complement):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if np.any(rho <= 0):
            raise DomainError("rho must be positive")
        gap = 1 - rho if complement is None else np.atleast_1d(np.asarray(complement, float))
        if np.any(gap <= 0):
            raise DomainError("rho must be below 1")
        return rho, gap

    def v0_tilde(self, rho: ArrayLike, derivative: int = 0) -> np.ndarray:
        """v0 int_rho^rho_m v0^-2, so that W(v0, v0~) = -1"""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        grid = self.branch0.grid
        if np.any(rho > grid.stop * (1 + 1e-12)):
            raise DomainError("v0~ is built below the matching radius only")
        start = grid.start
        deep = rho < start
        integral = np.empty(rho.shape, dtype=complex)
        if np.any(~deep):
            integral[~deep] = grid.antiderivative(self._inverse_square, rho[~deep], backward=True)
        if np.any(deep):
            # v0 = psi0 ~ -rho^2/2 below the grid
            base = grid.antiderivative(self._inverse_square, np.array([start]), backward=True)[0]
            integral[deep] = base + 4.0 / 3.0 * (rho[deep] ** -3.0 - start ** -3.0)
        values = self.v0(rho)
        if derivative == 0:
            return values * integral
        return self.v0(rho, 1) * integral - 1 / values

    def v0(
        self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None
    ) -> np.ndarray:
        """the solution regular at 0, in the v variable"""
        rho, gap = self._split(rho, complement)
        out = np.empty(rho.shape, dtype=complex)
        inner = rho <= self.branch0.grid.stop
        if np.any(inner):
            deep = inner & (rho < self.branch0.grid.start)
            shallow = inner & ~deep
            if np.any(shallow):
                out[shallow] = self.branch0(rho[shallow], derivative)
            if np.any(deep):
                out[deep] = free_fundamental(
                    FreeSolutionKind.PSI0, rho[deep], self.lam, derivative
                )
        if np.any(~inner):
            out[~inner] = self.A * self.branch1(
                rho[~inner], derivative, gap[~inner]
            ) + self.B * self.branch1_tilde(rho[~inner], derivative, gap[~inner])
        return out

    def v1(
        self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None
    ) -> np.ndarray:
        """the solution regular at 1, in the v variable"""
        rho, gap = self._split(rho, complement)
        out = np.empty(rho.shape, dtype=complex)
        outer = rho >= self.branch1.grid.start
        if np.any(outer):
            out[outer] = self.branch1(rho[outer], derivative, gap[outer])
        if np.any(~outer):
            out[~outer] = self.a * self.v0(rho[~outer], derivative) + self.b * self.v0_tilde(
                rho[~outer], derivative
            )
        return out

    def v1_tilde(
        self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None
    ) -> np.ndarray:
        """v1 at 1 - lambda, on [delta1/<omega>, 1)"""
        rho, gap = self._split(rho, complement)
        return self.branch1_tilde(rho, derivative, gap)

    def _to_u(self, getter, rho, derivative, complement):
        rho, gap = self._split(rho, complement)
        weight = transform_weight(rho, self.lam, 0, gap)
        values = getter(rho, 0, gap) / weight
        if derivative == 0:
            return values
        return (getter(rho, 1, gap) - values * transform_weight(rho, self.lam, 1, gap)) / weight

    def u0(self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None):
        """the solution of the spectral ODE regular at rho = 0"""
        return self._to_u(self.v0, rho, derivative, complement)

    def u1(self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None):
        """the solution of the spectral ODE regular at rho = 1"""
        return self._to_u(self.v1, rho, derivative, complement)

    def u1_tilde(
        self, rho: ArrayLike, derivative: int = 0, complement: Optional[ArrayLike] = None
    ):
        """the second solution at rho = 1"""
        return self._to_u(self.v1_tilde, rho, derivative, complement)

    def u0_tilde(self, rho: ArrayLike, derivative: int = 0):
        """the second solution at rho = 0, below the matching radius"""

        def getter(points, order, _gap):
            return self.v0_tilde(points, order)

        return self._to_u(getter, rho, derivative, None)

    def scaled_wronskian(self, rho: ArrayLike) -> np.ndarray:
        """rho^4 (1 - rho^2)^(1/2 + lambda) W(u0, u1)(rho)"""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        raw = _wronskian(self.u0(rho), self.u0(rho, 1), self.u1(rho), self.u1(rho, 1))
        return rho ** 4 * (1 - rho ** 2) ** (0.5 + self.lam.value) * raw

    def wronskian_spread(self, rhos: Sequence[float] = tuple(WRONSKIAN_CHECK_POINTS)) -> float:
        """max deviation of the scaled Wronskian from its mean, relative to max(|mean|, |W|)"""
        values = self.scaled_wronskian(np.asarray(rhos, dtype=float))
        mean = np.mean(values)
        scale = max(abs(mean), abs(self.branch1.wronskian))
        return float(np.max(np.abs(values - mean)) / scale)

    def check_wronskian(self) -> float:
        """the spread, or WronskianInvariantError past the configured tolerance"""
        spread = self.wronskian_spread()
        if spread > self.config.wronskian_tol:
            raise WronskianInvariantError(
                f"scaled Wronskian varies by {spread:.3e} at lambda = {self.lam.value}"
            )
        logger.debug("scaled Wronskian spread %.3e at lambda=%s", spread, self.lam.value)
        return spread


def build_u_pair(
    lam: Lambda,
    pot: PotentialSpec,
    config: Optional[VolterraConfig] = None,
    check: bool = True,
) -> FundamentalPair:
    """the perturbed fundamental system at lam, with its Wronskian invariant checked

    :param lam: The spectral parameter
    :param pot: The potential
    :param config: Radii and solver settings
    :param check: Whether to verify the scaled Wronskian is constant
    :raises MatchingError: When the matching Wronskian is nearly singular
    :raises WronskianInvariantError: When the scaled Wronskian is not constant
    :rtype: FundamentalPair
    """
    config = config or VolterraConfig()
    lam = as_parameter(lam)
    pair = FundamentalPair(
        lam=lam,
        pot=pot,
        config=config,
        branch0=build_v0(lam, pot, config),
        branch1=build_v1(lam, pot, config),
        branch1_tilde=build_v1(lam.reflected(), pot, config),
    )
    if check:
        pair.check_wronskian()
    return pair


def compute_w0(lam: Lambda, pot: PotentialSpec, config: Optional[VolterraConfig] = None) -> complex:
    """w0 = W(v0, v1) / W(lambda)"""
    return build_u_pair(lam, pot, config).w0
