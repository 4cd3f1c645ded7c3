""" nonlinear evolution around the ODE blowup and tuning of the blowup time

In similarity variables the perturbation Phi = (psi1 - c5, psi2 - 3/2 c5) obeys

    Phi' = L Phi + (0, N(phi1)),  N(x) = |c5 + x|^(4/3) (c5 + x) - c5^(7/3) - 35/4 x

Physical data v is mapped to Phi(0) = U(T, v), which also moves the blowup
time to T. Tuning T removes the component along the growing mode g.
"""
import logging
import math

from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from dataclasses import fields
from dataclasses import replace
from typing import Callable
from typing import Dict
from typing import Iterable
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np

from scipy import integrate
from scipy import optimize

from .coords import C5
from .coords import RadialField
from .coords import RadialGrid
from .coords import StatePair
from .coords import norm_lq
from .coords import norm_state_H
from .errors import BracketError
from .errors import ConfigError
from .errors import DomainError
from .semigroup import EIGENMODE
from .semigroup import ProjectionData
from .semigroup import Trajectory
from .semigroup import evolution_matrix
from .semigroup import integrate_flow
from .semigroup import riesz_setup
from .semigroup import stable_step
from .utils import seeded_generator

logger = logging.getLogger(__name__)

ArrayLike = np.ndarray

# F'(c5) = 7/3 c5^(4/3)
LINEAR_COEFFICIENT = 35.0 / 4.0

PERTURBATION_SHAPES = ("random", "tangent", "stable")
TUNING_METHODS = ("bisect", "brent")


def _power(y):
    return np.abs(y) ** (4.0 / 3.0) * y


_C5_POWER = _power(np.float64(C5))


def nonlinearity(x: ArrayLike) -> np.ndarray:
    """F(c5 + x) - F(c5) - F'(c5) x with F(y) = |y|^(4/3) y, real valued"""
    x = np.asarray(x, dtype=float)
    return _power(C5 + x) - _C5_POWER - LINEAR_COEFFICIENT * x


def nonlinearity_constant(points: Iterable[float]) -> float:
    """sup |N(x)| / (x^2 + |x|^(7/3)) over the nonzero points"""
    x = np.asarray([p for p in points if p != 0], dtype=float)
    return float(np.max(np.abs(nonlinearity(x)) / (x ** 2 + np.abs(x) ** (7.0 / 3.0))))


@dataclass(frozen=True)
class BlowupProfile:
    """u^T(t) = c5 (T - t)^(-3/2)"""

    T: float = 1.0  # pylint: disable=invalid-name

    @property
    def c5(self) -> float:
        """(15/4)^(3/4)"""
        return C5

    def __call__(self, t: float) -> float:
        if not t < self.T:
            raise DomainError(f"u^T is defined for t < T={self.T}, got {t}")
        return C5 * (self.T - t) ** -1.5

    def cylinder_state(self, grid: RadialGrid) -> StatePair:
        """(c5, 3/2 c5), the profile in similarity variables"""
        return StatePair.constant(grid, C5, 1.5 * C5)


@dataclass(frozen=True)
class PhysicalPerturbation:
    """radial data (v1, v2) on the ball of the given radius"""

    first: Callable[[np.ndarray], np.ndarray]
    second: Callable[[np.ndarray], np.ndarray]
    radius: float = 1.1

    def scaled(self, factor: float) -> "PhysicalPerturbation":
        """factor * v"""
        first, second = self.first, self.second
        return PhysicalPerturbation(
            lambda r: factor * first(r), lambda r: factor * second(r), self.radius
        )

    def sample(self, grid: RadialGrid, stretch: float = 1.0) -> StatePair:
        """(v1(stretch rho), v2(stretch rho)) at the nodes"""
        points = stretch * grid.nodes
        if np.max(points) > self.radius:
            raise DomainError(f"data on radius {self.radius} sampled out to {np.max(points)}")
        return StatePair(
            RadialField(grid, np.broadcast_to(self.first(points), points.shape)),
            RadialField(grid, np.broadcast_to(self.second(points), points.shape)),
        )

    @classmethod
    def zero(cls, radius: float = 1.1) -> "PhysicalPerturbation":
        """v = 0"""
        return cls(np.zeros_like, np.zeros_like, radius)


def initial_from_physical(
    v: PhysicalPerturbation,
    T: float,  # pylint: disable=invalid-name
    grid: RadialGrid,
    window: float = 0.1,
) -> StatePair:
    """U(T, v) in similarity variables

    U(T, v)(rho) = (T^(3/2) v1(T rho), T^(5/2) v2(T rho))
    + (c5 T^(3/2), 3/2 c5 T^(5/2)) - (c5, 3/2 c5)

    :param v: The physical perturbation
    :type v: PhysicalPerturbation
    :param T: The blowup time
    :type T: float
    :param grid: The collocation grid
    :type grid: RadialGrid
    :param window: T must lie in [1 - window, 1 + window]
    :type window: float
    :raises DomainError: When T leaves the window
    :rtype: StatePair
    """
    if not 1 - window <= T <= 1 + window:
        raise DomainError(f"T={T} lies outside [{1 - window}, {1 + window}]")
    data = v.sample(grid, T)
    shift = StatePair.constant(grid, C5 * (T ** 1.5 - 1), 1.5 * C5 * (T ** 2.5 - 1))
    return StatePair(data.first * T ** 1.5, data.second * T ** 2.5) + shift


def _cosine_series(coefficients: np.ndarray, period: float) -> Callable[[np.ndarray], np.ndarray]:
    modes = np.arange(coefficients.size)

    def series(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.cos(np.pi * np.multiply.outer(r, modes) / period) @ coefficients

    return series


def perturbation_shape(  # pylint: disable=too-many-arguments
    kind: str,
    grid: RadialGrid,
    rng: np.random.Generator,
    projection: Optional[ProjectionData] = None,
    modes: int = 6,
    radius: float = 1.1,
) -> PhysicalPerturbation:
    """a perturbation direction with unit H norm on the unit ball

    'random' is a band-limited cosine series in both components, 'tangent' is
    the growing mode g, 'stable' is a random shape with its g component removed.
    """
    if kind not in PERTURBATION_SHAPES:
        raise DomainError(f"unknown perturbation shape {kind}, expected {PERTURBATION_SHAPES}")
    if kind == "tangent":
        first_value, second_value = EIGENMODE
        shape = PhysicalPerturbation(
            lambda r: np.full(np.shape(r), first_value),
            lambda r: np.full(np.shape(r), second_value),
            radius,
        )
    else:
        decay = (1.0 + np.arange(modes + 1)) ** 2
        first = _cosine_series(rng.standard_normal(modes + 1) / decay, 2 * radius)
        second = _cosine_series(rng.standard_normal(modes + 1) / decay, 2 * radius)
        shape = PhysicalPerturbation(first, second, radius)
        if kind == "stable":
            projection = projection or riesz_setup(grid)
            coefficient = projection.coefficient(shape.sample(grid)).real
            first_value, second_value = (coefficient * c for c in EIGENMODE)
            shape = PhysicalPerturbation(
                lambda r: first(r) - first_value, lambda r: second(r) - second_value, radius
            )
    return shape.scaled(1.0 / norm_state_H(shape.sample(grid)))


@dataclass(frozen=True)
class ExperimentConfig:  # pylint: disable=too-many-instance-attributes
    """one nonlinear stability experiment"""

    shape: str = "random"
    delta: float = 1e-2
    window: float = 0.1
    tau_max: float = 10.0
    dt: Optional[float] = None
    grid_order: int = 24
    seed: int = 0
    sample_dt: float = 0.05
    blow_past: float = 10.0
    method: str = "brent"
    t_tol: float = 1e-8
    coefficient_tol: float = 1e-6
    modes: int = 6

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if not 0 < self.window < 1:
            raise ConfigError(f"the T window must lie in (0, 1), got {self.window}")
        if not self.tau_max > 0:
            raise ConfigError(f"tau_max must be positive, got {self.tau_max}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.grid_order < 8:
            raise ConfigError(f"grid order must be at least 8, got {self.grid_order}")
        if self.shape not in PERTURBATION_SHAPES:
            raise ConfigError(f"unknown perturbation shape {self.shape}")
        if self.method not in TUNING_METHODS:
            raise ConfigError(f"unknown tuning method {self.method}")

    @property
    def t_window(self) -> Tuple[float, float]:
        """[1 - window, 1 + window]"""
        return 1 - self.window, 1 + self.window

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object], **overrides) -> "ExperimentConfig":
        """build from a flat config section with hyphenated keys

        :raises ConfigError: On unknown keys or invalid values
        """
        known = {f.name for f in fields(cls)}
        kwargs: Dict[str, object] = {}
        for key, value in mapping.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown stability-sweep key '{key}'")
            kwargs[name] = value
        kwargs.update(overrides)
        try:
            return cls(**kwargs)  # type: ignore[arg-type]
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def with_delta(self, delta: float) -> "ExperimentConfig":
        """the same experiment at another amplitude"""
        return replace(self, delta=delta)

    def perturbation(
        self, grid: RadialGrid, projection: Optional[ProjectionData] = None
    ) -> PhysicalPerturbation:
        """delta times the configured shape, drawn from the configured seed"""
        rng = seeded_generator(self.seed)
        shape = perturbation_shape(self.shape, grid, rng, projection, self.modes, 1 + self.window)
        return shape.scaled(self.delta)


def evolve_nonlinear(  # pylint: disable=too-many-arguments
    cfg: ExperimentConfig,
    T: float,  # pylint: disable=invalid-name
    v: Optional[PhysicalPerturbation] = None,
    grid: Optional[RadialGrid] = None,
    projection: Optional[ProjectionData] = None,
) -> Trajectory:
    """RK4 method of lines for the full perturbation system from U(T, v)

    The run ends at tau_max or once ||Phi||_H exceeds ``blow_past``; the reason
    is kept in ``meta['stopped']``.

    :raises EvolutionInstabilityError: On non-finite states, with the partial trajectory
    :rtype: Trajectory
    """
    grid = grid or RadialGrid(cfg.grid_order)
    if v is None:
        v = cfg.perturbation(grid, projection)
    initial = initial_from_physical(v, T, grid, cfg.window)
    matrix = evolution_matrix(grid)
    size = grid.size
    dt = cfg.dt or stable_step(grid, matrix)

    def rhs(vector: np.ndarray) -> np.ndarray:
        out = matrix @ vector
        out[size:] += nonlinearity(vector[:size])
        return out

    def blow_past(_tau: float, norm: float) -> Optional[str]:
        return "blow-past" if norm > cfg.blow_past else None

    trajectory = integrate_flow(initial, rhs, cfg.tau_max, dt, cfg.sample_dt, blow_past, real=True)
    trajectory.meta.update({"T": T, "delta": cfg.delta, "grid_order": grid.order})
    return trajectory


def projection_trace(trajectory: Trajectory, projection: ProjectionData) -> np.ndarray:
    """Re (Phi(tau)|g*)_H per sample"""
    return np.array([projection.coefficient(state).real for state in trajectory.states])


def _simpson(values: np.ndarray, times: np.ndarray) -> float:
    if times.size < 2:
        return 0.0
    return float(integrate.simpson(values, x=times))


def strichartz_diagnostic(trajectory: Trajectory) -> float:
    """int_0^tau_end ||phi1(tau)||^2_L5(B5) dtau"""
    values = np.array([norm_lq(state.first, 5.0) ** 2 for state in trajectory.states])
    return _simpson(values, trajectory.times)


def _nonlinear_state(state: StatePair) -> StatePair:
    grid = state.grid
    return StatePair(
        RadialField.zeros(grid), RadialField(grid, nonlinearity(state.first.values.real))
    )


def correction_norm(
    trajectory: Trajectory, initial: StatePair, projection: Optional[ProjectionData] = None
) -> float:
    """||P[u + int_0^tau_end e^-sigma N(Phi(sigma)) dsigma]||_H"""
    projection = projection or riesz_setup(initial.grid)
    weights = np.exp(-trajectory.times)
    coefficients = np.array(
        [projection.coefficient(_nonlinear_state(state)) for state in trajectory.states]
    )
    total = projection.coefficient(initial)
    total += _simpson(weights * coefficients.real, trajectory.times)
    total += 1j * _simpson(weights * coefficients.imag, trajectory.times)
    return abs(total) * norm_state_H(projection.g)


def correction_tail(trajectory: Trajectory) -> float:
    """e^-tau_end times the largest ||N(Phi)||_H seen, the size of the truncated tail"""
    largest = max(norm_state_H(_nonlinear_state(state)) for state in trajectory.states)
    return math.exp(-trajectory.times[-1]) * largest


@dataclass(frozen=True)
class StabilityReport:  # pylint: disable=too-many-instance-attributes
    """the outcome of one tuned run"""

    delta: float
    T_star: float  # pylint: disable=invalid-name
    strichartz_integral: float
    sup_H_norm: float  # pylint: disable=invalid-name
    initial_H_norm: float  # pylint: disable=invalid-name
    terminal_coefficient: float
    correction_norm: float
    correction_tail: float
    converged: bool
    evaluations: int
    trace_times: Tuple[float, ...] = field(default=(), repr=False)
    projection_trace: Tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.strichartz_integral < 0:
            raise DomainError("the Strichartz integral cannot be negative")

    def as_row(self) -> Dict[str, object]:
        """the scalar fields"""
        row = asdict(self)
        row.pop("trace_times")
        row.pop("projection_trace")
        return row


class _Converged(Exception):
    """raised inside the root finder once the coefficient is small enough"""

    def __init__(self, T: float):  # pylint: disable=invalid-name
        super().__init__(T)
        self.T = T  # pylint: disable=invalid-name


class BlowupTimeTuner:
    """finds T* with a vanishing terminal projection coefficient

    Trajectories are cached by T so the report reuses the run at T*.
    """

    def __init__(
        self,
        cfg: ExperimentConfig,
        v: Optional[PhysicalPerturbation] = None,
        grid: Optional[RadialGrid] = None,
        projection: Optional[ProjectionData] = None,
    ):
        self.cfg = cfg
        self.grid = grid or RadialGrid(cfg.grid_order)
        self.projection = projection or riesz_setup(self.grid)
        self.v = v if v is not None else cfg.perturbation(self.grid, self.projection)
        self._runs: Dict[float, Trajectory] = {}
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def run(self, T: float) -> Trajectory:  # pylint: disable=invalid-name
        """the cached trajectory from U(T, v)"""
        if T not in self._runs:
            self._runs[T] = evolve_nonlinear(self.cfg, T, self.v, self.grid, self.projection)
        return self._runs[T]

    def coefficient(self, T: float) -> float:  # pylint: disable=invalid-name
        """Re (Phi(tau_end)|g*)_H for the run from U(T, v)"""
        value = self.projection.coefficient(self.run(T).final).real
        self._logger.debug("T=%.12f: terminal coefficient %.6e", T, value)
        return value

    def _target(self, T: float) -> float:  # pylint: disable=invalid-name
        value = self.coefficient(T)
        if abs(value) < self.cfg.coefficient_tol:
            raise _Converged(T)
        return value

    def _bisect(self, lo: float, hi: float, f_lo: float) -> float:
        while hi - lo > self.cfg.t_tol:
            middle = 0.5 * (lo + hi)
            f_middle = self._target(middle)
            if (f_middle > 0) == (f_lo > 0):
                lo, f_lo = middle, f_middle
            else:
                hi = middle
        return 0.5 * (lo + hi)

    def tune(self) -> float:
        """T* in the window

        :raises BracketError: When the coefficient has one sign across the window
        """
        lo, hi = self.cfg.t_window
        try:
            self._target(1.0)
            f_lo, f_hi = self._target(lo), self._target(hi)
            if (f_lo > 0) == (f_hi > 0):
                raise BracketError(
                    f"terminal coefficients {f_lo:.3e}, {f_hi:.3e} at T={lo}, {hi} share a sign"
                )
            if self.cfg.method == "bisect":
                return self._bisect(lo, hi, f_lo)
            return float(optimize.brentq(self._target, lo, hi, xtol=self.cfg.t_tol))
        except _Converged as done:
            return done.T

    def report(self, T_star: float) -> StabilityReport:  # pylint: disable=invalid-name
        """diagnostics of the run at T*"""
        trajectory = self.run(T_star)
        trace = projection_trace(trajectory, self.projection)
        reached = trajectory.meta["stopped"] is None
        terminal = float(trace[-1])
        return StabilityReport(
            delta=self.cfg.delta,
            T_star=T_star,
            strichartz_integral=strichartz_diagnostic(trajectory),
            sup_H_norm=float(np.max(trajectory.norms)),
            initial_H_norm=float(trajectory.norms[0]),
            terminal_coefficient=terminal,
            correction_norm=correction_norm(trajectory, trajectory.states[0], self.projection),
            correction_tail=correction_tail(trajectory),
            converged=bool(reached and np.all(np.isfinite(trajectory.norms))),
            evaluations=len(self._runs),
            trace_times=tuple(float(t) for t in trajectory.times),
            projection_trace=tuple(float(c) for c in trace),
        )


def tune_blowup_time(
    cfg: ExperimentConfig,
    v: Optional[PhysicalPerturbation] = None,
    grid: Optional[RadialGrid] = None,
    projection: Optional[ProjectionData] = None,
) -> Tuple[float, StabilityReport]:
    """the blowup time whose run has no growing component, and its report

    :param cfg: The experiment
    :type cfg: ExperimentConfig
    :param v: The perturbation, drawn from cfg when omitted
    :type v: PhysicalPerturbation
    :raises BracketError: When the window does not bracket a sign change
    :rtype: tuple
    """
    tuner = BlowupTimeTuner(cfg, v, grid, projection)
    T_star = tuner.tune()  # pylint: disable=invalid-name
    report = tuner.report(T_star)
    logger.info(
        "delta=%.3e: T*=%.10f after %s runs, strichartz %.6e",
        cfg.delta,
        T_star,
        report.evaluations,
        report.strichartz_integral,
    )
    return T_star, report


def largest_tunable_delta(
    cfg: ExperimentConfig, deltas: Sequence[float]
) -> Tuple[Optional[float], Dict[float, Optional[StabilityReport]]]:
    """the largest delta whose tuning converges, with every attempt's report

    A delta whose window does not bracket a sign change maps to None.
    """
    reports: Dict[float, Optional[StabilityReport]] = {}
    best = None
    for delta in sorted(deltas, reverse=True):
        try:
            _t_star, report = tune_blowup_time(cfg.with_delta(delta))
        except BracketError as exc:
            logger.info("delta=%.3e not tunable: %s", delta, exc)
            reports[delta] = None
            continue
        reports[delta] = report
        if report.converged and best is None:
            best = delta
    return best, reports
