""" similarity coordinates, the radial collocation grid and the norms of the energy space

The backward lightcone {0 <= t < T, r <= T - t} is mapped to the cylinder
tau = log(T / (T - t)), rho = r / (T - t). Radial fields live on the positive
half of a Gauss-Legendre rule and are treated as restrictions of even functions.
"""
import logging
import math

from dataclasses import dataclass
from functools import cached_property
from typing import Callable
from typing import Iterable
from typing import Tuple
from typing import Union

import numpy as np

from numpy.polynomial import legendre
from scipy import integrate
from scipy import special
from scipy.interpolate import BarycentricInterpolator

from .errors import DomainError
from .errors import GridMismatchError

logger = logging.getLogger(__name__)

# the ODE blowup u^T = C5 (T - t)^(-3/2)
C5 = (15.0 / 4.0) ** 0.75

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ConeConfig:
    """the blowup time T of the backward lightcone"""

    T: float = 1.0  # pylint: disable=invalid-name

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError(f"blowup time must be positive, got {self.T}")


@dataclass(frozen=True)
class SimilarityPoint:
    """a point (tau, rho) of the cylinder"""

    tau: float
    rho: float

    def __post_init__(self):
        if not self.tau >= 0:
            raise DomainError(f"tau must be non-negative, got {self.tau}")
        if not 0 <= self.rho <= 1:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho}")


@dataclass(frozen=True)
class NormSpec:
    """a Strichartz admissible pair, 1/p + 5/q = 3/2"""

    p: float
    q: float

    def __post_init__(self):
        if not 2 <= self.p <= math.inf:
            raise DomainError(f"temporal exponent must lie in [2, inf], got {self.p}")
        if not 10.0 / 3.0 - 1e-12 <= self.q <= 5 + 1e-12:
            raise DomainError(f"spatial exponent must lie in [10/3, 5], got {self.q}")
        inv_p = 0.0 if math.isinf(self.p) else 1.0 / self.p
        if abs(inv_p + 5.0 / self.q - 1.5) > 1e-12:
            raise DomainError(f"({self.p}, {self.q}) violates 1/p + 5/q = 3/2")

    @classmethod
    def from_q(cls, q: float) -> "NormSpec":
        """the admissible pair with spatial exponent q"""
        inv_p = 1.5 - 5.0 / q
        return cls(p=math.inf if inv_p <= 0 else 1.0 / inv_p, q=q)


def to_similarity(t: float, r: float, cfg: ConeConfig) -> SimilarityPoint:
    """map a physical point of the backward lightcone to the cylinder

    :param t: The physical time
    :type t: float
    :param r: The physical radius
    :type r: float
    :param cfg: The cone
    :type cfg: ConeConfig
    :return: The cylinder point
    :rtype: SimilarityPoint
    """
    if not 0 <= t < cfg.T:
        raise DomainError(f"t={t} is outside [0, T) for T={cfg.T}")
    width = cfg.T - t
    if r < 0 or r > width * (1 + 4 * np.finfo(float).eps):
        raise DomainError(f"r={r} is outside the backward cone of width {width}")
    tau = -math.log1p(-t / cfg.T)
    return SimilarityPoint(tau=tau, rho=min(r / width, 1.0))


def from_similarity(pt: SimilarityPoint, cfg: ConeConfig) -> Tuple[float, float]:
    """map a cylinder point back to physical (t, r)"""
    t = -cfg.T * math.expm1(-pt.tau)
    r = cfg.T * math.exp(-pt.tau) * pt.rho
    return t, r


class RadialGrid:
    """Gauss-Legendre collocation on (0, 1) for even radial functions

    The grid holds the ``order`` positive nodes of the 2*order point rule, so no
    node sits at 0 or 1. Weights are matched to the measure r^4 dr and integrate
    f r^4 exactly whenever the even extension of the integrand is a polynomial of
    degree at most ``exactness``.
    """

    def __init__(self, order: int):
        if order < 2:
            raise DomainError(f"grid order must be at least 2, got {order}")
        self.order = int(order)
        full_nodes, full_weights = legendre.leggauss(2 * self.order)
        self._full_nodes = full_nodes
        self.nodes = full_nodes[self.order :]
        self.base_weights = full_weights[self.order :]
        self.weights = self.base_weights * self.nodes ** 4
        self.exactness = 4 * self.order - 1
        logger.debug("radial grid of order %s, min spacing %.3e", self.order, self.min_spacing)

    def __repr__(self):
        return f"RadialGrid(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, RadialGrid) and other.order == self.order

    def __hash__(self):
        return hash(("RadialGrid", self.order))

    @property
    def size(self) -> int:
        """the number of collocation nodes"""
        return self.order

    @cached_property
    def min_spacing(self) -> float:
        """the smallest gap between neighbouring nodes, including the gap to 1"""
        gaps = np.diff(np.concatenate([self.nodes, [1.0]]))
        return float(min(gaps.min(), 2 * self.nodes[0]))

    @cached_property
    def _full_differentiation(self) -> np.ndarray:
        nodes = self._full_nodes
        full_weights = legendre.leggauss(2 * self.order)[1]
        signs = (-1.0) ** np.arange(nodes.size)
        bary = signs * np.sqrt((1 - nodes ** 2) * full_weights)
        diff = nodes[:, None] - nodes[None, :]
        np.fill_diagonal(diff, 1.0)
        matrix = (bary[None, :] / bary[:, None]) / diff
        np.fill_diagonal(matrix, 0.0)
        np.fill_diagonal(matrix, -matrix.sum(axis=1))
        return matrix

    def _fold_even(self, matrix: np.ndarray) -> np.ndarray:
        order = self.order
        return matrix[order:, order:] + matrix[order:, order - 1 :: -1]

    @cached_property
    def differentiation_matrix(self) -> np.ndarray:
        """d/drho acting on node values of an even function"""
        return self._fold_even(self._full_differentiation)

    @cached_property
    def second_differentiation_matrix(self) -> np.ndarray:
        """d^2/drho^2 acting on node values of an even function"""
        full = self._full_differentiation
        return self._fold_even(full @ full)

    def derivative(self, values: np.ndarray) -> np.ndarray:
        """spectral first derivative at the nodes"""
        return self.differentiation_matrix @ np.asarray(values)

    def second_derivative(self, values: np.ndarray) -> np.ndarray:
        """spectral second derivative at the nodes"""
        return self.second_differentiation_matrix @ np.asarray(values)

    def interpolate(self, values: np.ndarray, points: ArrayLike) -> np.ndarray:
        """barycentric interpolation of the even extension at arbitrary points"""
        values = np.asarray(values)
        full_values = np.concatenate([values[::-1], values])
        interpolant = BarycentricInterpolator(self._full_nodes, full_values)
        return interpolant(np.asarray(points, dtype=float))

    def boundary_value(self, values: np.ndarray) -> complex:
        """the trace at rho = 1 by extrapolation from the interior nodes"""
        return complex(self.interpolate(values, np.array([1.0]))[0])

    def integrate(self, values: np.ndarray) -> complex:
        """integral of values * r^4 over (0, 1)"""
        return complex(np.dot(self.weights, values))


@dataclass(frozen=True, eq=False)
class RadialField:
    """samples of a radial function at the nodes of a grid"""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.size,):
            raise GridMismatchError(
                f"expected {self.grid.size} values for {self.grid}, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: RadialGrid, func: Callable[[np.ndarray], ArrayLike]):
        """sample func at the nodes"""
        return cls(grid, np.broadcast_to(func(grid.nodes), grid.nodes.shape))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        """the zero field"""
        return cls(grid, np.zeros(grid.size))

    def _check(self, other: "RadialField") -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"{self.grid} and {other.grid} differ")

    def derivative(self) -> "RadialField":
        """the spectral derivative"""
        return RadialField(self.grid, self.grid.derivative(self.values))

    def at(self, points: ArrayLike) -> np.ndarray:
        """evaluate by interpolation"""
        return self.grid.interpolate(self.values, points)

    def __add__(self, other: "RadialField") -> "RadialField":
        self._check(other)
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        self._check(other)
        return RadialField(self.grid, self.values - other.values)

    def __mul__(self, scalar: complex) -> "RadialField":
        return RadialField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "RadialField":
        return RadialField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class StatePair:
    """the two components (u1, u2) of the first order system"""

    first: RadialField
    second: RadialField

    def __post_init__(self):
        if self.first.grid != self.second.grid:
            raise GridMismatchError(
                f"state components live on {self.first.grid} and {self.second.grid}"
            )

    @property
    def grid(self) -> RadialGrid:
        """the common grid"""
        return self.first.grid

    @classmethod
    def from_vector(cls, grid: RadialGrid, vector: np.ndarray) -> "StatePair":
        """split a stacked node vector"""
        vector = np.asarray(vector)
        if vector.shape != (2 * grid.size,):
            raise GridMismatchError(f"expected {2 * grid.size} entries, got {vector.shape}")
        return cls(RadialField(grid, vector[: grid.size]), RadialField(grid, vector[grid.size :]))

    @classmethod
    def from_functions(cls, grid: RadialGrid, first: Callable, second: Callable) -> "StatePair":
        """sample both components"""
        return cls(RadialField.from_function(grid, first), RadialField.from_function(grid, second))

    @classmethod
    def constant(cls, grid: RadialGrid, first: complex, second: complex) -> "StatePair":
        """the constant state"""
        ones = np.ones(grid.size)
        return cls(RadialField(grid, first * ones), RadialField(grid, second * ones))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "StatePair":
        """the zero state"""
        return cls.constant(grid, 0.0, 0.0)

    def as_vector(self) -> np.ndarray:
        """stacked node values"""
        return np.concatenate([self.first.values, self.second.values])

    def __add__(self, other: "StatePair") -> "StatePair":
        return StatePair(self.first + other.first, self.second + other.second)

    def __sub__(self, other: "StatePair") -> "StatePair":
        return StatePair(self.first - other.first, self.second - other.second)

    def __mul__(self, scalar: complex) -> "StatePair":
        return StatePair(self.first * scalar, self.second * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "StatePair":
        return StatePair(-self.first, -self.second)


def physical_to_cylinder(
    u_slice: RadialField, du_slice: RadialField, pt_tau: float, cfg: ConeConfig
) -> StatePair:
    """weight a physical slice into cylinder variables

    The slices hold u(t, (T - t) rho) and u_t(t, (T - t) rho) at the nodes for the
    physical time t matching ``pt_tau``.

    :param u_slice: The field on the cone cross section
    :type u_slice: RadialField
    :param du_slice: Its time derivative on the cross section
    :type du_slice: RadialField
    :param pt_tau: The cylinder time
    :type pt_tau: float
    :param cfg: The cone
    :type cfg: ConeConfig
    :return: (psi1, psi2)
    :rtype: StatePair
    """
    if u_slice.grid != du_slice.grid:
        raise GridMismatchError(f"slices live on {u_slice.grid} and {du_slice.grid}")
    if pt_tau < 0:
        raise DomainError(f"tau must be non-negative, got {pt_tau}")
    width = cfg.T * math.exp(-pt_tau)
    return StatePair(u_slice * width ** 1.5, du_slice * width ** 2.5)


def sample_cone_slice(
    u_fn: Callable, du_fn: Callable, tau: float, grid: RadialGrid, cfg: ConeConfig
) -> Tuple[RadialField, RadialField]:
    """sample u(t, r) and u_t(t, r) on the cross section at cylinder time tau"""
    t, _r = from_similarity(SimilarityPoint(tau=tau, rho=0.0), cfg)
    radii = (cfg.T - t) * grid.nodes
    return (
        RadialField(grid, np.broadcast_to(u_fn(t, radii), grid.nodes.shape)),
        RadialField(grid, np.broadcast_to(du_fn(t, radii), grid.nodes.shape)),
    )


def norm_lq(f: RadialField, q: float, R: float = 1.0) -> float:  # pylint: disable=invalid-name
    """(int_0^R |f|^q r^4 dr)^(1/q)

    :param f: The field
    :type f: RadialField
    :param q: The exponent, at least 1
    :type q: float
    :param R: The radius in (0, 1]
    :type R: float
    :rtype: float
    """
    if not q >= 1:
        raise DomainError(f"exponent must be at least 1, got {q}")
    if not 0 < R <= 1:
        raise DomainError(f"radius must lie in (0, 1], got {R}")
    grid = f.grid
    if R == 1:
        total = np.dot(grid.weights, np.abs(f.values) ** q)
    else:
        values = f.at(R * grid.nodes)
        total = R ** 5 * np.dot(grid.weights, np.abs(values) ** q)
    return float(total ** (1.0 / q))


def norm_h1(f: RadialField) -> float:
    """the H^1(B^5) norm of a radial field"""
    grid = f.grid
    derivative = grid.derivative(f.values)
    total = np.dot(grid.weights, np.abs(f.values) ** 2 + np.abs(derivative) ** 2)
    return float(math.sqrt(total))


def norm_state_H(s: StatePair) -> float:  # pylint: disable=invalid-name
    """||f||_H^2 = ||f1||_H1^2 + ||f2||_L2^2"""
    return math.hypot(norm_h1(s.first), norm_lq(s.second, 2.0))


def gram_matrix(grid: RadialGrid) -> np.ndarray:
    """M with (f|g)_H = g^H M f on stacked node vectors"""
    weights = np.diag(grid.weights)
    diff = grid.differentiation_matrix
    first = diff.T @ weights @ diff + weights
    size = grid.size
    gram = np.zeros((2 * size, 2 * size))
    gram[:size, :size] = first
    gram[size:, size:] = weights
    return gram


def inner_h(f: StatePair, g: StatePair) -> complex:
    """the H inner product (f|g)_H, linear in f"""
    if f.grid != g.grid:
        raise GridMismatchError(f"states live on {f.grid} and {g.grid}")
    return complex(np.conj(g.as_vector()) @ gram_matrix(f.grid) @ f.as_vector())


def inner_energy(f: StatePair, g: StatePair) -> complex:
    """(f|g)_E = int f1' conj(g1') r^4 + int f2 conj(g2) r^4 + f1(1) conj(g1(1))"""
    if f.grid != g.grid:
        raise GridMismatchError(f"states live on {f.grid} and {g.grid}")
    grid = f.grid
    df1 = grid.derivative(f.first.values)
    dg1 = grid.derivative(g.first.values)
    bulk = np.dot(grid.weights, df1 * np.conj(dg1) + f.second.values * np.conj(g.second.values))
    trace = grid.boundary_value(f.first.values) * np.conj(grid.boundary_value(g.first.values))
    return complex(bulk + trace)


def band_limited_field(grid: RadialGrid, rng: np.random.Generator, modes: int = 8) -> RadialField:
    """a random smooth even field, sum of c_k cos(k pi rho) with decaying c_k"""
    coefficients = rng.standard_normal(modes + 1) / (1.0 + np.arange(modes + 1)) ** 2
    values = np.cos(np.pi * np.outer(grid.nodes, np.arange(modes + 1))) @ coefficients
    return RadialField(grid, values)


def band_limited_state(grid: RadialGrid, rng: np.random.Generator, modes: int = 8) -> StatePair:
    """a random smooth state with independent components"""
    return StatePair(band_limited_field(grid, rng, modes), band_limited_field(grid, rng, modes))


def energy_equivalence_envelope(corpus: Iterable[StatePair]) -> Tuple[float, float]:
    """min and max of ||f||_E^2 / ||f||_H^2 over a corpus"""
    ratios = [inner_energy(state, state).real / norm_state_H(state) ** 2 for state in corpus]
    return float(min(ratios)), float(max(ratios))


class GaussianProfile:
    """Q(x) = amplitude exp(-((x - center) / width)^2) with all its derivatives"""

    def __init__(self, amplitude: float = 1.0, center: float = 0.0, width: float = 0.5):
        self.amplitude = amplitude
        self.center = center
        self.width = width

    def derivative(self, order: int, x: ArrayLike) -> np.ndarray:
        """the derivative of the given order"""
        y = (np.asarray(x, dtype=float) - self.center) / self.width
        hermite = special.eval_hermite(order, y)
        return self.amplitude * (-1) ** order * hermite * np.exp(-(y ** 2)) / self.width ** order


class FreeWaveSolution:
    """the radial solution u = (r^-1 d_r)^2 [Q(t + r) + Q(t - r)] of the free 5D wave equation"""

    # the series is used below this multiple of the profile width
    _SERIES_RADIUS = 0.05
    _SERIES_TERMS = 6

    def __init__(self, profile: GaussianProfile, time_derivative: int = 0):
        self.profile = profile
        self._shift = time_derivative

    def time_derivative(self) -> "FreeWaveSolution":
        """u_t, the same construction with Q replaced by Q'"""
        return FreeWaveSolution(self.profile, self._shift + 1)

    def _q(self, order: int, x: ArrayLike) -> np.ndarray:
        return self.profile.derivative(order + self._shift, x)

    def __call__(self, t: float, r: ArrayLike) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        small = r < self._SERIES_RADIUS * self.profile.width
        big = ~small
        if np.any(big):
            rb = r[big]
            plus = self._q(2, t + rb) + self._q(2, t - rb)
            minus = self._q(1, t + rb) - self._q(1, t - rb)
            out[big] = plus / rb ** 2 - minus / rb ** 3
        if np.any(small):
            rs = r[small]
            total = np.zeros_like(rs)
            for j in range(self._SERIES_TERMS):
                coefficient = 2.0 * (2 * j + 2) / math.factorial(2 * j + 3)
                total += coefficient * self._q(2 * j + 4, t) * rs ** (2 * j)
            out[small] = total
        return out


def cylinder_strichartz_integral(
    psi1: Callable[[float, np.ndarray], np.ndarray], tau_max: float, grid: RadialGrid
) -> float:
    """int_0^tau_max ||psi1(tau) - C5||^2_{L^5(B^5)} dtau"""

    def integrand(tau: float) -> float:
        values = np.abs(psi1(tau, grid.nodes) - C5) ** 5
        return float(np.dot(grid.weights, values) ** 0.4)

    value, _error = integrate.quad(integrand, 0.0, tau_max, epsabs=0.0, epsrel=1e-12, limit=400)
    return value


def cone_strichartz_integral(
    u_fn: Callable[[float, np.ndarray], np.ndarray], cfg: ConeConfig, t_max: float, grid: RadialGrid
) -> float:
    """int_0^t_max ||u(t) - u^T(t)||^2_{L^5(B^5_{T-t})} dt in physical variables"""
    if not 0 <= t_max < cfg.T:
        raise DomainError(f"t_max={t_max} must lie in [0, T)")

    def integrand(t: float) -> float:
        width = cfg.T - t
        radii = width * grid.nodes
        blowup = C5 * width ** -1.5
        values = np.abs(u_fn(t, radii) - blowup) ** 5
        return float((width ** 5 * np.dot(grid.weights, values)) ** 0.4)

    value, _error = integrate.quad(integrand, 0.0, t_max, epsabs=0.0, epsrel=1e-12, limit=400)
    return value


def cylinder_to_cone(
    psi1: Callable[[float, np.ndarray], np.ndarray], cfg: ConeConfig
) -> Callable[[float, np.ndarray], np.ndarray]:
    """the physical field u(t, r) = (T - t)^(-3/2) psi1(tau, r / (T - t))"""

    def u_fn(t: float, r: np.ndarray) -> np.ndarray:
        width = cfg.T - t
        tau = -math.log1p(-t / cfg.T)
        return width ** -1.5 * psi1(tau, np.asarray(r) / width)

    return u_fn
