""" the linearized flow around the blowup solution

The generator acts on node values of (u1, u2) as

    L u = (-rho u1' - 3/2 u1 + u2, u1'' + 4/rho u1' - rho u2' - 5/2 u2 - V u1)

with V = -35/4 for the linearization. This module holds the Riesz projection
onto the growing mode g = (2, 5), the Laplace inversion of the resolvent along
Re lambda = eps, a fixed step time stepper, and the numerical checks on the
oscillatory kernel bounds that the decay of the flow rests on.
"""
import logging
import math

from dataclasses import dataclass
from dataclasses import field
from functools import cached_property
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from numpy.polynomial import legendre
from scipy import linalg
from scipy import special

from .coords import ConeConfig
from .coords import FreeWaveSolution
from .coords import GaussianProfile
from .coords import RadialField
from .coords import RadialGrid
from .coords import StatePair
from .coords import gram_matrix
from .coords import norm_h1
from .coords import norm_lq
from .coords import norm_state_H
from .coords import physical_to_cylinder
from .coords import sample_cone_slice
from .errors import DomainError
from .errors import EigenvalueIsolationError
from .errors import EvolutionInstabilityError
from .errors import QuadratureConvergenceError
from .fitting import RateFit
from .fitting import power_with_offset
from .fitting import semilog_slope
from .green import CutoffSpec
from .green import GreenKernel
from .green import resolvent_apply
from .quadrature import filon_fourier
from .quadrature import oscillatory_fourier
from .specfun import SpectralParameter
from .volterra import PotentialSpec
from .volterra import VolterraConfig

logger = logging.getLogger(__name__)

# the growing mode of the linearization, eigenvalue 1
EIGENMODE = (2.0, 5.0)

# RK4 is stable on the imaginary axis up to 2 sqrt(2)
RK4_REACH = 2.5


def evolution_matrix(grid: RadialGrid, pot: Optional[PotentialSpec] = None) -> np.ndarray:
    """the discretized generator on stacked node vectors (u1, u2)

    :param grid: The collocation grid
    :type grid: RadialGrid
    :param pot: The potential, the linearization V = -35/4 when omitted
    :type pot: PotentialSpec
    :rtype: numpy.ndarray
    """
    pot = pot or PotentialSpec.linearized()
    rho = grid.nodes
    size = grid.size
    diff = grid.differentiation_matrix
    second = grid.second_differentiation_matrix
    identity = np.eye(size)
    advect = rho[:, None] * diff
    matrix = np.zeros((2 * size, 2 * size))
    matrix[:size, :size] = -advect - 1.5 * identity
    matrix[:size, size:] = identity
    matrix[size:, :size] = second + (4 / rho)[:, None] * diff - np.diag(pot(rho))
    matrix[size:, size:] = -advect - 2.5 * identity
    return matrix


@dataclass(frozen=True, eq=False)
class ProjectionData:
    """P f = (f|g*)_H g, the spectral projection onto the growing mode"""

    g: StatePair
    g_star: StatePair
    eigenvalue: complex
    gap: float
    residual: float

    def coefficient(self, state: StatePair) -> complex:
        """(f|g*)_H"""
        gram = gram_matrix(state.grid)
        return complex(np.conj(self.g_star.as_vector()) @ gram @ state.as_vector())

    def apply(self, state: StatePair) -> StatePair:
        """P f"""
        return self.g * self.coefficient(state)

    def complement(self, state: StatePair) -> StatePair:
        """(I - P) f"""
        return state - self.apply(state)


def riesz_setup(
    grid: RadialGrid, pot: Optional[PotentialSpec] = None, isolation: float = 1e-2
) -> ProjectionData:
    """g, g* and the projection for the discrete generator

    g* is the left eigenvector y at the eigenvalue nearest 1, scaled so that
    y^H g = 1 and carried over to the H inner product by g* = M^-1 y.

    :param grid: The collocation grid
    :type grid: RadialGrid
    :param pot: The potential, the linearization when omitted
    :type pot: PotentialSpec
    :param isolation: The smallest admissible distance to the next eigenvalue
    :type isolation: float
    :raises EigenvalueIsolationError: When another eigenvalue crowds the one nearest 1
    :rtype: ProjectionData
    """
    matrix = evolution_matrix(grid, pot)
    eigenvalues, left, _right = linalg.eig(matrix, left=True, right=True)
    index = int(np.argmin(np.abs(eigenvalues - 1.0)))
    others = np.delete(eigenvalues, index)
    gap = float(np.min(np.abs(others - eigenvalues[index])))
    if gap < isolation:
        raise EigenvalueIsolationError(
            f"eigenvalue {eigenvalues[index]} is within {gap:.3e} of another eigenvalue"
        )
    g = StatePair.constant(grid, *EIGENMODE)
    g_vector = g.as_vector()
    left_vector = left[:, index]
    left_vector = left_vector / np.conj(np.conj(left_vector) @ g_vector)
    g_star = StatePair.from_vector(grid, np.linalg.solve(gram_matrix(grid), left_vector))
    residual = float(np.max(np.abs(matrix @ g_vector - g_vector)))
    logger.debug(
        "riesz projection on %s: eigenvalue %s, gap %.3e, |(L - 1) g| = %.3e",
        grid,
        eigenvalues[index],
        gap,
        residual,
    )
    return ProjectionData(
        g=g, g_star=g_star, eigenvalue=complex(eigenvalues[index]), gap=gap, residual=residual
    )


@dataclass(frozen=True)
class ContourSpec:
    """the line Re lambda = eps, truncated at |omega| <= omega_max

    The resolvent is split as R f = f/(lambda + c) + (L + c) f/(lambda + c)^2
    + R (L + c)^2 f/(lambda + c)^2 with c = ``shift``; the first two terms are
    inverted in closed form. The omega step is the smaller of pi/(4 tau + 1) and
    the step that pushes the trapezoid aliasing factor exp(-2 pi eps/step) below
    ``alias_tol``. ``n_points`` overrides the step with a fixed node count on
    [-omega_max, omega_max].
    """

    eps: float = 0.05
    omega_max: float = 200.0
    n_points: Optional[int] = None
    shift: float = 1.0
    tol: float = 1e-4
    alias_tol: float = 1e-7

    def __post_init__(self):
        if not 0 < self.eps <= 0.25:
            raise DomainError(f"contour abscissa must lie in (0, 1/4], got {self.eps}")
        if not self.omega_max > 0:
            raise DomainError(f"omega_max must be positive, got {self.omega_max}")
        if self.n_points is not None and self.n_points < 3:
            raise DomainError(f"a contour needs at least 3 points, got {self.n_points}")
        if self.shift < 0:
            raise DomainError(f"the pole shift must be non-negative, got {self.shift}")

    def step(self, tau_max: float) -> float:
        """the omega spacing for times up to tau_max"""
        if self.n_points is not None:
            return 2 * self.omega_max / (self.n_points - 1)
        oscillation = math.pi / (4 * tau_max + 1)
        aliasing = 2 * math.pi * self.eps / math.log(1 / self.alias_tol)
        return min(oscillation, aliasing)


def _trapezoid_weights(count: int, half: bool) -> np.ndarray:
    """weights for nodes k = 0..count-1 of the symmetric rule, node 0 is omega = 0"""
    weights = np.ones(count)
    weights[-1] = 0.5
    if half:
        weights[0] = 0.5
    return weights


def _line_integrals(
    phase: np.ndarray, count: int, real_data: bool
) -> Tuple[np.ndarray, np.ndarray]:
    """trapezoid sums over |omega| <= omega_max and |omega| <= 2 omega_max

    With real data only omega >= 0 is sampled and the other half is the
    complex conjugate.
    """
    if real_data:
        short = _trapezoid_weights(count, True) @ phase[:count]
        long_ = _trapezoid_weights(2 * count - 1, True) @ phase
        return 2 * short.real, 2 * long_.real
    middle = 2 * count - 2
    short = _trapezoid_weights(count, False) @ phase[middle : middle + count]
    short = short + _trapezoid_weights(count, True)[1:] @ phase[middle - 1 : middle - count : -1]
    long_ = np.sum(phase, axis=0) - 0.5 * (phase[0] + phase[-1])
    return short, long_


class LaplaceInverter:
    """[S(tau)(I - P) f]_1 by contour quadrature of the resolvent

    The resolvent values at every node are computed once per state and reused
    for all requested times and for the doubled truncation.

    :param grid: The collocation grid
    :type grid: RadialGrid
    :param pot: The potential
    :type pot: PotentialSpec
    :param contour: The contour parameters
    :type contour: ContourSpec
    :param backend: 'collocation' for the discrete resolvent, 'green' for the
        Green function quadrature
    :type backend: str
    :param projection: Applied as (I - P) before inversion when given
    :type projection: ProjectionData
    """

    def __init__(  # pylint: disable=too-many-arguments
        self,
        grid: RadialGrid,
        pot: Optional[PotentialSpec] = None,
        contour: Optional[ContourSpec] = None,
        backend: str = "collocation",
        projection: Optional[ProjectionData] = None,
        config: Optional[VolterraConfig] = None,
    ):
        if backend not in ("collocation", "green"):
            raise DomainError(f"unknown resolvent backend {backend}")
        self.grid = grid
        self.pot = pot or PotentialSpec.linearized()
        self.contour = contour or ContourSpec()
        self.backend = backend
        self.projection = projection
        self.config = config
        self.matrix = evolution_matrix(grid, self.pot)
        self.last_tail_change: Dict[float, float] = {}

    @cached_property
    def _schur(self) -> Tuple[np.ndarray, np.ndarray]:
        triangular, unitary = linalg.schur(self.matrix.astype(complex), output="complex")
        return triangular, unitary

    def _collocation(self, lams: np.ndarray, data: StatePair) -> np.ndarray:
        """first components of (lambda - L)^-1 h, via the complex Schur form of L"""
        triangular, unitary = self._schur
        size = self.grid.size
        projected = np.conj(unitary.T) @ data.as_vector()
        identity = np.eye(triangular.shape[0])
        out = np.empty((lams.size, size), dtype=complex)
        for k, lam in enumerate(lams):
            solved = linalg.solve_triangular(lam * identity - triangular, projected)
            out[k] = (unitary @ solved)[:size]
        return out

    def _green(self, lams: np.ndarray, data: StatePair) -> np.ndarray:
        out = np.empty((lams.size, self.grid.size), dtype=complex)
        for k, lam in enumerate(lams):
            field_ = resolvent_apply(
                data,
                SpectralParameter.from_complex(lam),
                self.pot,
                backend="green",
                config=self.config,
                eigenvalues=(),
            )
            out[k] = field_.values
        return out

    def resolvent_values(self, lams: np.ndarray, data: StatePair) -> np.ndarray:
        """[R(lambda) h]_1 at each lambda, one row per lambda"""
        if self.backend == "collocation":
            return self._collocation(lams, data)
        return self._green(lams, data)

    def invert(self, state: StatePair, taus: Sequence[float]) -> List[RadialField]:
        """the first component of the semigroup at each tau

        :param state: The data f
        :type state: StatePair
        :param taus: Non-negative times
        :raises QuadratureConvergenceError: When doubling omega_max changes the
            result by more than 10 times the contour tolerance
        :rtype: list
        """
        taus = [float(tau) for tau in taus]
        if any(tau < 0 for tau in taus):
            raise DomainError(f"times must be non-negative, got {taus}")
        if self.projection is not None:
            state = self.projection.complement(state)
        contour = self.contour
        shift = contour.shift
        vector = state.as_vector()
        shifted = self.matrix + shift * np.eye(vector.size)
        once = shifted @ vector
        data = StatePair.from_vector(self.grid, shifted @ once)

        step = contour.step(max(taus + [0.0]))
        count = int(math.floor(contour.omega_max / step + 1e-9)) + 1
        real_data = not np.any(np.imag(vector)) and not np.any(np.imag(data.as_vector()))
        positive = step * np.arange(2 * count - 1)
        if real_data:
            omegas = positive
        else:
            omegas = np.concatenate([-positive[:0:-1], positive])
        lams = contour.eps + 1j * omegas
        values = self.resolvent_values(lams, data)
        values = values / ((lams + shift) ** 2)[:, None]
        logger.debug(
            "laplace inversion: %s nodes, step %.3e, backend %s", lams.size, step, self.backend
        )

        scale = max(float(np.max(np.abs(vector))), 1e-300)
        out = []
        for tau in taus:
            phase = np.exp(lams * tau)[:, None] * values
            short, long_ = _line_integrals(phase, count, real_data)
            short = short * step / (2 * math.pi)
            long_ = long_ * step / (2 * math.pi)
            change = float(np.max(np.abs(long_ - short))) / scale
            self.last_tail_change[tau] = change
            if change > 10 * contour.tol:
                raise QuadratureConvergenceError(
                    f"contour tail at tau={tau} changes by {change:.3e} when omega_max doubles"
                )
            closed = math.exp(-shift * tau) * (vector + tau * once)[: self.grid.size]
            out.append(RadialField(self.grid, closed + short))
        return out


def laplace_invert(
    state: StatePair,
    tau: float,
    contour: Optional[ContourSpec] = None,
    pot: Optional[PotentialSpec] = None,
    projection: Optional[ProjectionData] = None,
    backend: str = "collocation",
) -> RadialField:
    """[S(tau) f]_1 by Laplace inversion along Re lambda = eps

    The data is expected in the stable subspace; pass ``projection`` to apply
    (I - P) first.
    """
    inverter = LaplaceInverter(state.grid, pot, contour, backend, projection)
    return inverter.invert(state, [tau])[0]


class RK4Stepper:
    """classic four stage Runge-Kutta for u' = rhs(u) with a fixed step

    :param state: The initial vector, copied
    :type state: numpy.ndarray
    :param rhs: The right hand side
    :type rhs: callable
    """

    def __init__(self, state: np.ndarray, rhs: Callable[[np.ndarray], np.ndarray]):
        self.state = np.array(state, copy=True)
        self.rhs = rhs
        self._allocate_arrays()

    def step(self, dt: float) -> np.ndarray:
        """advance by dt in place and return the state"""
        self._start[...] = self.state
        self._accumulated[...] = 0.0
        for half, weight in zip((dt / 2, dt / 2, dt), (dt / 6, dt / 3, dt / 3)):
            slope = self.rhs(self.state)
            self._accumulated += weight * slope
            self.state[...] = self._start + half * slope
        slope = self.rhs(self.state)
        self.state[...] = self._start + self._accumulated + (dt / 6) * slope
        return self.state

    def _allocate_arrays(self):
        self._start = np.copy(self.state)
        self._accumulated = np.zeros_like(self.state)


def stable_step(grid: RadialGrid, matrix: np.ndarray) -> float:
    """min(0.5 h_min, 2.5 / spectral radius)"""
    radius = float(np.max(np.abs(np.linalg.eigvals(matrix))))
    return min(0.5 * grid.min_spacing, RK4_REACH / radius)


@dataclass
class Trajectory:
    """states sampled at increasing times starting from 0"""

    times: np.ndarray
    states: List[StatePair]
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size != len(self.states):
            raise DomainError(f"{self.times.size} times for {len(self.states)} states")
        if self.times.size:
            if self.times[0] != 0:
                raise DomainError(f"a trajectory starts at 0, not {self.times[0]}")
            if np.any(np.diff(self.times) <= 0):
                raise DomainError("trajectory times must increase strictly")

    @property
    def final(self) -> StatePair:
        """the last state"""
        return self.states[-1]

    @cached_property
    def norms(self) -> np.ndarray:
        """||Phi(tau)||_H per sample"""
        return np.array([norm_state_H(state) for state in self.states])

    def growth(self) -> float:
        """sup_tau ||Phi(tau)||_H / ||Phi(0)||_H"""
        if self.norms[0] == 0:
            return 0.0 if not np.any(self.norms) else math.inf
        return float(np.max(self.norms) / self.norms[0])

    def growth_rate(self, start: float = 0.0) -> RateFit:
        """the slope of log ||Phi(tau)||_H from tau = start on"""
        keep = self.times >= start
        return semilog_slope(self.times[keep], self.norms[keep])


def integrate_flow(  # pylint: disable=too-many-arguments,too-many-locals
    initial: StatePair,
    rhs: Callable[[np.ndarray], np.ndarray],
    tau_max: float,
    dt: float,
    sample_dt: float = 0.05,
    should_stop: Optional[Callable[[float, float], Optional[str]]] = None,
    real: bool = False,
) -> Trajectory:
    """march u' = rhs(u) with RK4 and sample every sample_dt

    ``should_stop(tau, norm)`` returns a reason to end early, or None. Non-finite
    states raise with the partial trajectory attached. With ``real`` the state
    is marched as a real vector.
    """
    if not tau_max > 0:
        raise DomainError(f"tau_max must be positive, got {tau_max}")
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    sample_dt = min(sample_dt, tau_max)
    substeps = max(1, int(math.ceil(sample_dt / dt - 1e-12)))
    dt = sample_dt / substeps
    samples = int(round(tau_max / sample_dt))
    grid = initial.grid
    vector = initial.as_vector()
    stepper = RK4Stepper(vector.real if real else vector, rhs)
    times = [0.0]
    states = [initial]
    meta: Dict[str, object] = {"dt": dt, "steps": 0, "stopped": None}
    for k in range(1, samples + 1):
        for _ in range(substeps):
            stepper.step(dt)
        meta["steps"] = k * substeps
        tau = k * sample_dt
        current = StatePair.from_vector(grid, stepper.state.copy())
        if not np.all(np.isfinite(stepper.state)):
            raise EvolutionInstabilityError(
                f"non-finite state at tau={tau:.3f}",
                Trajectory(np.array(times), states, meta),
            )
        times.append(tau)
        states.append(current)
        if should_stop is not None:
            reason = should_stop(tau, norm_state_H(current))
            if reason:
                meta["stopped"] = reason
                break
    logger.debug("integrated %s steps of size %.3e to tau=%.3f", meta["steps"], dt, times[-1])
    return Trajectory(np.array(times), states, meta)


def linear_evolve(  # pylint: disable=too-many-arguments
    state: StatePair,
    tau_max: float,
    dt: Optional[float] = None,
    pot: Optional[PotentialSpec] = None,
    sample_dt: float = 0.05,
    margin: float = 10.0,
) -> Trajectory:
    """method of lines for Phi' = L Phi

    :param state: The initial state
    :type state: StatePair
    :param tau_max: The final time
    :type tau_max: float
    :param dt: The step, stable_step when omitted
    :type dt: float
    :param pot: The potential, the linearization when omitted
    :type pot: PotentialSpec
    :param margin: Growth past margin * exp(2 tau) * ||Phi(0)||_H aborts
    :type margin: float
    :raises EvolutionInstabilityError: On runaway growth, with the partial trajectory
    :rtype: Trajectory
    """
    matrix = evolution_matrix(state.grid, pot)
    if dt is None:
        dt = stable_step(state.grid, matrix)
    initial_norm = norm_state_H(state)

    def generator(vector: np.ndarray) -> np.ndarray:
        return matrix @ vector

    def runaway(tau: float, norm: float) -> Optional[str]:
        if norm > margin * math.exp(2 * tau) * initial_norm:
            return f"||Phi|| = {norm:.3e} at tau={tau:.3f} outgrew exp(2 tau)"
        return None

    trajectory = integrate_flow(state, generator, tau_max, dt, sample_dt, runaway)
    if trajectory.meta["stopped"]:
        logger.warning("linear evolution aborted: %s", trajectory.meta["stopped"])
        raise EvolutionInstabilityError(str(trajectory.meta["stopped"]), trajectory)
    return trajectory


def free_cylinder_evolution(
    profile: GaussianProfile, T: float, tau: float, grid: RadialGrid  # pylint: disable=invalid-name
) -> StatePair:
    """the exact free wave (r^-1 d_r)^2 [Q(t + r) + Q(t - r)] in cylinder variables at tau"""
    cfg = ConeConfig(T=T)
    solution = FreeWaveSolution(profile)
    u_slice, du_slice = sample_cone_slice(solution, solution.time_derivative(), tau, grid, cfg)
    return physical_to_cylinder(u_slice, du_slice, tau, cfg)


@dataclass(frozen=True)
class KernelQuadrature:
    """uniform omega samples on [0, omega_max] for Filon's rule, refined by halving the step"""

    omega_max: float = 32.0
    n_omega: int = 129
    rho_nodes: int = 24
    refine_tol: float = 0.1

    def __post_init__(self):
        if self.n_omega < 3 or self.n_omega % 2 == 0:
            raise DomainError(f"n_omega must be odd and at least 3, got {self.n_omega}")
        if not self.omega_max > 0:
            raise DomainError(f"omega_max must be positive, got {self.omega_max}")

    def refined(self) -> "KernelQuadrature":
        """the same range with twice the resolution"""
        return KernelQuadrature(
            self.omega_max, 2 * self.n_omega - 1, self.rho_nodes, self.refine_tol
        )

    @property
    def step(self) -> float:
        """the omega spacing"""
        return self.omega_max / (self.n_omega - 1)


@dataclass(frozen=True)
class KernelBoundResult:  # pylint: disable=too-many-instance-attributes
    """one measurement of a kernel against its decay bound"""

    n: int
    tau: float
    s: float
    norm: float
    bound: float
    ratio: float
    refinement_change: float
    eps_change: Optional[float] = None


def kernel_bound(tau: float, s: float) -> float:
    """s^2 (1 - s)^(-1/2) |x|^(-1/10) <x>^(-1) with x = tau + log(1 - s)"""
    if not 0 < s < 1:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if tau < 0:
        raise DomainError(f"tau must be non-negative, got {tau}")
    shifted = tau + math.log1p(-s)
    if shifted == 0:
        raise DomainError(f"tau={tau} and s={s} sit on the singular locus tau + log(1 - s) = 0")
    return s ** 2 / math.sqrt(1 - s) * abs(shifted) ** -0.1 / math.hypot(1.0, shifted)


class KernelBoundStudy:
    """the omega integrals of the pieces G_n at lambda = eps + i omega

    Kernels are built once per omega and shared between pieces, times and the
    refined rule, whose nodes include the coarse ones.

    :param pot: The potential
    :type pot: PotentialSpec
    :param quad: The omega rule
    :type quad: KernelQuadrature
    """

    def __init__(
        self,
        pot: Optional[PotentialSpec] = None,
        quad: Optional[KernelQuadrature] = None,
        config: Optional[VolterraConfig] = None,
    ):
        self.pot = pot or PotentialSpec.linearized()
        self.quad = quad or KernelQuadrature()
        self.config = config or VolterraConfig()
        self.cutoff = CutoffSpec.from_config(self.config)
        self._kernels: Dict[Tuple[float, float], GreenKernel] = {}

    def kernel(self, eps: float, omega: float) -> GreenKernel:
        """the cached kernel at eps + i omega"""
        key = (float(eps), float(omega))
        if key not in self._kernels:
            lam = SpectralParameter(eps=float(eps), omega=float(omega))
            self._kernels[key] = GreenKernel.build(lam, self.pot, self.config, self.cutoff)
        return self._kernels[key]

    def _rho_rule(self, s: float) -> Tuple[np.ndarray, np.ndarray]:
        nodes, weights = legendre.leggauss(self.quad.rho_nodes)
        lower = 0.5 * s * (nodes + 1)
        upper = s + 0.5 * (1 - s) * (nodes + 1)
        points = np.concatenate([lower, upper])
        rule = np.concatenate([0.5 * s * weights, 0.5 * (1 - s) * weights])
        return points, rule * points ** 4

    def kernel_values(  # pylint: disable=too-many-arguments
        self, n: int, tau: float, s: float, quad: KernelQuadrature, eps: float = 0.0
    ) -> Tuple[np.ndarray, np.ndarray]:
        """int e^(lambda tau) G_n(rho, s; lambda) d omega at the rho nodes"""
        points, weights = self._rho_rule(s)
        omegas = quad.step * np.arange(quad.n_omega)
        s_values = np.full(points.shape, s)
        samples = np.array(
            [self.kernel(eps, omega).component(n, points, s_values) for omega in omegas]
        )
        half_line = filon_fourier(samples, 0.0, quad.step, tau)[0]
        return 2 * math.exp(eps * tau) * half_line.real, weights

    def norm(  # pylint: disable=too-many-arguments
        self,
        n: int,
        tau: float,
        s: float,
        quad: Optional[KernelQuadrature] = None,
        eps: float = 0.0,
    ) -> float:
        """the L^5(B^5) norm in rho of the omega integral"""
        if n not in range(1, 7):
            raise DomainError(f"the Green function has pieces 1..6, not {n}")
        if self.pot.is_zero:
            return 0.0
        values, weights = self.kernel_values(n, tau, s, quad or self.quad, eps)
        return float(np.dot(weights, np.abs(values) ** 5) ** 0.2)

    def measure(
        self, n: int, tau: float, s: float, eps_check: Optional[float] = None
    ) -> KernelBoundResult:
        """norm, bound and ratio, with the change under refinement

        :raises QuadratureConvergenceError: When halving the omega step changes
            the norm by more than ``refine_tol``
        """
        bound = kernel_bound(tau, s)
        coarse = self.norm(n, tau, s)
        fine = self.norm(n, tau, s, self.quad.refined())
        change = abs(fine - coarse) / fine if fine else 0.0
        if change > self.quad.refine_tol:
            raise QuadratureConvergenceError(
                f"G_{n} at tau={tau}, s={s}: refinement changes the norm by {change:.2%}"
            )
        eps_change = None
        if eps_check is not None:
            shifted = self.norm(n, tau, s, eps=eps_check)
            eps_change = abs(shifted - coarse) / coarse if coarse else 0.0
        result = KernelBoundResult(
            n=n,
            tau=tau,
            s=s,
            norm=coarse,
            bound=bound,
            ratio=coarse / bound,
            refinement_change=change,
            eps_change=eps_change,
        )
        logger.debug("kernel bound %s", result)
        return result


def kernel_bound_ratio(
    n: int,
    tau: float,
    s: float,
    quad: Optional[KernelQuadrature] = None,
    pot: Optional[PotentialSpec] = None,
) -> float:
    """||int e^(i omega tau) G_n(., s; i omega) d omega||_L5 / bound(tau, s)"""
    return KernelBoundStudy(pot, quad).measure(n, tau, s).ratio


@dataclass(frozen=True)
class SymbolFamily:
    """a symbol f(omega), the bound on its Fourier transform and the exact transform if known"""

    name: str
    symbol: Callable[[float], float]
    parity: str
    bound: Callable[[float], float]
    exact: Optional[Callable[[float], complex]] = None


def _bracket(x: float) -> float:
    return math.hypot(1.0, x)


def _cutoff_symbol(rho: float, power: int, extra: int) -> Callable[[float], float]:
    cutoff = CutoffSpec()

    def symbol(omega: float) -> float:
        bracket = _bracket(omega)
        return float(
            rho ** -power * (1 - cutoff.chi(rho * bracket)) * bracket ** (-power - extra)
        )

    return symbol


def _even_power_exact(alpha: float) -> Callable[[float], complex]:
    order = (alpha - 1) / 2

    def exact(a: float) -> complex:
        x = abs(a)
        scale = 2 * math.sqrt(math.pi) / special.gamma(alpha / 2)
        return complex(scale * (x / 2) ** order * special.kv(order, x))

    return exact


SYMBOL_FAMILIES = (
    "odd_rational",
    "odd_slow",
    "even_power",
    "cutoff_rho1",
    "cutoff_rho2",
    "gaussian",
)


def symbol_family(
    name: str, alpha: float = 0.9, rho: float = 0.05, power: int = 2
) -> SymbolFamily:
    """a member of the symbol catalog

    :param name: One of SYMBOL_FAMILIES
    :param alpha: The exponent of 'even_power', in (0, 1)
    :param rho: The radius in the cutoff families
    :param power: n in rho^-n of the cutoff families
    """
    if name == "odd_rational":
        return SymbolFamily(
            name,
            lambda w: w / (1 + w * w) ** 2,
            "odd",
            lambda a: _bracket(a) ** -2,
            lambda a: 0.5j * math.pi * a * math.exp(-abs(a)),
        )
    if name == "odd_slow":
        return SymbolFamily(
            name,
            lambda w: w / (1 + w * w),
            "odd",
            lambda a: _bracket(a) ** -2,
            lambda a: 1j * math.pi * math.copysign(1.0, a) * math.exp(-abs(a)),
        )
    if name == "even_power":
        if not 0 < alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
        return SymbolFamily(
            name,
            lambda w: (1 + w * w) ** (-alpha / 2),
            "even",
            lambda a: abs(a) ** (alpha - 1) * _bracket(a) ** -2,
            _even_power_exact(alpha),
        )
    if name in ("cutoff_rho1", "cutoff_rho2"):
        if not 0 < rho <= 1:
            raise DomainError(f"rho must lie in (0, 1], got {rho}")
        if name == "cutoff_rho1":
            if power < 1:
                raise DomainError(f"cutoff_rho1 needs n >= 1, got {power}")
            return SymbolFamily(
                name, _cutoff_symbol(rho, power, 1), "even", lambda a: _bracket(a) ** -2
            )
        if power < 2:
            raise DomainError(f"cutoff_rho2 needs n >= 2, got {power}")
        return SymbolFamily(
            name,
            _cutoff_symbol(rho, power, 0),
            "even",
            lambda a: 1 / (abs(a) * _bracket(a) ** 2),
        )
    if name == "gaussian":
        return SymbolFamily(
            name,
            lambda w: math.exp(-w * w),
            "even",
            lambda a: _bracket(a) ** -2,
            lambda a: complex(math.sqrt(math.pi) * math.exp(-a * a / 4)),
        )
    raise DomainError(f"unknown symbol family {name}, expected one of {SYMBOL_FAMILIES}")


def osc_transform(family: SymbolFamily, a: float, method: str = "quad") -> complex:
    """int exp(i a omega) f(omega) d omega

    ``method`` is 'quad' for the oscillatory quadrature or 'exact' for the
    closed form where the family has one.
    """
    if method == "exact":
        if family.exact is None:
            raise DomainError(f"{family.name} has no closed form transform")
        return family.exact(a)
    if method != "quad":
        raise DomainError(f"unknown transform method {method}")
    return oscillatory_fourier(family.symbol, a, family.parity)


def osc_decay_check(  # pylint: disable=too-many-arguments
    family: Union[str, SymbolFamily],
    a: float,
    alpha: float = 0.9,
    rho: float = 0.05,
    power: int = 2,
    method: str = "quad",
) -> float:
    """|int exp(i a omega) f(omega) d omega| divided by the bound of the family

    :raises QuadratureConvergenceError: When the tail of the oscillatory
        integral does not converge
    :rtype: float
    """
    if a == 0:
        raise DomainError("the frequency must be nonzero")
    if isinstance(family, str):
        family = symbol_family(family, alpha, rho, power)
    return abs(osc_transform(family, a, method)) / family.bound(a)


def small_frequency_exponent(
    family: SymbolFamily, frequencies: Sequence[float], method: str = "exact"
) -> RateFit:
    """the exponent p in |transform(a)| ~ A a^p + B for small a"""
    values = [abs(osc_transform(family, a, method)) for a in frequencies]
    return power_with_offset(frequencies, values)


@dataclass(frozen=True)
class WeightedNormReport:
    """||r f||_L2(0,1) / ||f||_H1 and ||r f||_L5(B5) / ||f||_H1"""

    l2_ratio: float
    l5_ratio: float
    h1_norm: float
    h1_drift: float
    near_extremal: bool


def weighted_norm_inequalities(f: RadialField, drift_limit: float = 1e-2) -> WeightedNormReport:
    """both weighted norm ratios for one field

    The H^1 norm is recomputed from the field interpolated to a grid of half the
    order; a relative drift above ``drift_limit`` marks the field as rough, near
    the edge of H^1.
    """
    grid = f.grid
    h1 = norm_h1(f)
    weighted = RadialField(grid, grid.nodes * f.values)
    l2 = math.sqrt(float(np.dot(grid.base_weights, np.abs(weighted.values) ** 2)))
    l5 = norm_lq(weighted, 5.0)
    coarse = RadialGrid(max(2, grid.order // 2))
    coarse_h1 = norm_h1(RadialField(coarse, f.at(coarse.nodes)))
    drift = abs(coarse_h1 - h1) / h1 if h1 else 0.0
    report = WeightedNormReport(
        l2_ratio=l2 / h1 if h1 else 0.0,
        l5_ratio=l5 / h1 if h1 else 0.0,
        h1_norm=h1,
        h1_drift=drift,
        near_extremal=drift > drift_limit,
    )
    logger.debug("weighted norms: %s", report)
    return report
