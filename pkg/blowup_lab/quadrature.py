""" Gauss-Legendre panels, Filon's rule and oscillatory Fourier integrals

A panel is an interval in a mapped variable y carrying a fixed order
Gauss-Legendre rule. Three maps are available, the identity, s = exp(y) for
scales that shrink towards 0 and s = 1 - exp(-y) for the algebraic endpoint
weight at s = 1. For the last one the complement 1 - s is kept exactly.
"""
import logging
import math
import warnings

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

from .errors import DomainError
from .errors import QuadratureConvergenceError

logger = logging.getLogger(__name__)

PANEL_ORDER = 16

ArrayLike = Union[float, np.ndarray]


class PanelMap(Enum):
    """the change of variables s(y) of a panel"""

    LINEAR = "linear"
    LOG = "log"
    EXP = "exp"


@dataclass(frozen=True)
class PanelOperators:
    """the reference rule on [-1, 1] and its integration matrices

    ``forward[i, j]`` integrates the interpolant of values at the nodes from -1
    to node i, ``backward[i, j]`` from node i to 1.
    """

    nodes: np.ndarray
    weights: np.ndarray
    to_coefficients: np.ndarray
    forward: np.ndarray
    backward: np.ndarray


def _antiderivative_basis(t: np.ndarray, order: int) -> np.ndarray:
    """int_{-1}^{t} P_k for k < order, as rows per point"""
    vander = legendre.legvander(np.asarray(t, dtype=float), order)
    out = np.empty((vander.shape[0], order))
    out[:, 0] = np.asarray(t) + 1.0
    for k in range(1, order):
        out[:, k] = (vander[:, k + 1] - vander[:, k - 1]) / (2 * k + 1)
    return out


@lru_cache(maxsize=8)
def panel_operators(order: int = PANEL_ORDER) -> PanelOperators:
    """the cached reference operators of a panel"""
    nodes, weights = legendre.leggauss(order)
    to_coefficients = np.linalg.inv(legendre.legvander(nodes, order - 1))
    forward = _antiderivative_basis(nodes, order) @ to_coefficients
    backward = weights[None, :] - forward
    return PanelOperators(nodes, weights, to_coefficients, forward, backward)


def _map(kind: PanelMap, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """s, 1 - s and ds/dy"""
    if kind is PanelMap.LINEAR:
        return y, 1.0 - y, np.ones_like(y)
    if kind is PanelMap.LOG:
        s = np.exp(y)
        return s, -np.expm1(y), s
    t = np.exp(-y)
    return -np.expm1(-y), t, t


def _inverse(kind: PanelMap, s: np.ndarray, complement: Optional[np.ndarray]) -> np.ndarray:
    if kind is PanelMap.LINEAR:
        return s
    if kind is PanelMap.LOG:
        return np.log(s)
    if complement is not None:
        return -np.log(complement)
    return -np.log1p(-s)


# (s_yy / s_y) for the chain rule of the second derivative
_CURVATURE = {PanelMap.LINEAR: 0.0, PanelMap.LOG: 1.0, PanelMap.EXP: -1.0}


@dataclass(frozen=True)
class Panel:
    """one interval [y_lo, y_hi] of a mapped variable"""

    kind: PanelMap
    y_lo: float
    y_hi: float

    @property
    def half_width(self) -> float:
        """(y_hi - y_lo) / 2"""
        return (self.y_hi - self.y_lo) / 2

    def bounds(self) -> Tuple[float, float]:
        """the panel ends in s"""
        s, _t, _j = _map(self.kind, np.array([self.y_lo, self.y_hi]))
        return float(s[0]), float(s[1])

    def gaps(self) -> Tuple[float, float]:
        """1 - s at the panel ends"""
        _s, t, _j = _map(self.kind, np.array([self.y_lo, self.y_hi]))
        return float(t[0]), float(t[1])


class PanelGrid:
    """a composite rule on consecutive panels, ordered by increasing s

    :param panels: The panels, contiguous in s
    :type panels: list
    :param order: Nodes per panel
    :type order: int
    """

    def __init__(self, panels: Sequence[Panel], order: int = PANEL_ORDER):
        if not panels:
            raise DomainError("a panel grid needs at least one panel")
        self.panels: List[Panel] = list(panels)
        self.order = order
        ops = panel_operators(order)
        self.ops = ops
        count = len(self.panels)
        self.points = np.empty((count, order))
        self.complements = np.empty((count, order))
        self.jacobians = np.empty((count, order))
        self.weights = np.empty((count, order))
        for index, panel in enumerate(self.panels):
            y = panel.y_lo + (ops.nodes + 1) * panel.half_width
            s, t, jac = _map(panel.kind, y)
            self.points[index] = s
            self.complements[index] = t
            self.jacobians[index] = jac
            self.weights[index] = ops.weights * panel.half_width * jac
        self._lower = np.array([panel.bounds()[0] for panel in self.panels])
        self._upper = np.array([panel.bounds()[1] for panel in self.panels])
        self._upper_gap = np.array([panel.gaps()[1] for panel in self.panels])
        logger.debug(
            "panel grid with %s panels on [%.3e, 1 - %.3e]",
            count,
            self._lower[0],
            self._upper_gap[-1],
        )

    def __repr__(self):
        return f"PanelGrid(panels={len(self.panels)}, order={self.order})"

    @classmethod
    def uniform(
        cls, kind: PanelMap, y_start: float, y_stop: float, width: float, order: int = PANEL_ORDER
    ) -> "PanelGrid":
        """panels of (at most) the given width covering [y_start, y_stop]"""
        if not y_stop > y_start:
            raise DomainError(f"empty panel range [{y_start}, {y_stop}]")
        count = max(1, int(math.ceil((y_stop - y_start) / width - 1e-12)))
        edges = np.linspace(y_start, y_stop, count + 1)
        return cls([Panel(kind, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])], order)

    @classmethod
    def concatenate(cls, grids: Sequence["PanelGrid"]) -> "PanelGrid":
        """join grids that follow each other in s"""
        panels = [panel for grid in grids for panel in grid.panels]
        return cls(panels, grids[0].order)

    @property
    def size(self) -> int:
        """the number of nodes"""
        return self.points.size

    @property
    def start(self) -> float:
        """the smallest s covered"""
        return float(self._lower[0])

    @property
    def stop(self) -> float:
        """the largest s covered"""
        return float(self._upper[-1])

    @property
    def stop_complement(self) -> float:
        """1 - stop, exact for endpoint panels"""
        return float(self._upper_gap[-1])

    def flat(self, values: np.ndarray) -> np.ndarray:
        """panel-major values as one vector"""
        return np.asarray(values).reshape(self.size)

    def shaped(self, values: np.ndarray) -> np.ndarray:
        """one row per panel"""
        return np.asarray(values).reshape(len(self.panels), self.order)

    def integrate(self, values: np.ndarray) -> complex:
        """the integral over the whole grid"""
        return complex(np.sum(self.weights * self.shaped(values)))

    def local_forward(self, index: int) -> np.ndarray:
        """the within-panel forward integration matrix in s"""
        panel = self.panels[index]
        return self.ops.forward * (panel.half_width * self.jacobians[index])[None, :]

    def local_backward(self, index: int) -> np.ndarray:
        """the within-panel backward integration matrix in s"""
        panel = self.panels[index]
        return self.ops.backward * (panel.half_width * self.jacobians[index])[None, :]

    def cumulative(self, values: np.ndarray, backward: bool = False) -> np.ndarray:
        """integrals from the grid start to every node, or from every node to the grid end"""
        shaped = self.shaped(values)
        totals = np.sum(self.weights * shaped, axis=1)
        out = np.empty_like(shaped, dtype=complex)
        if not backward:
            offsets = np.concatenate([[0.0], np.cumsum(totals)[:-1]])
            for index in range(len(self.panels)):
                out[index] = offsets[index] + self.local_forward(index) @ shaped[index]
        else:
            offsets = np.concatenate([np.cumsum(totals[::-1])[::-1][1:], [0.0]])
            for index in range(len(self.panels)):
                out[index] = offsets[index] + self.local_backward(index) @ shaped[index]
        return out

    def locate(
        self, x: ArrayLike, complement: Optional[ArrayLike] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """the panel index and the local coordinate in [-1, 1] of every point

        With ``complement`` the panel is found from 1 - x, which stays distinct
        where x itself rounds to 1.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        tol = 1e-12 * max(1.0, abs(self.stop))
        if np.any(x < self.start - tol):
            raise DomainError(f"points below the grid start {self.start}")
        if complement is None:
            gaps = None
            if np.any(x > self.stop + tol):
                raise DomainError(f"points above the grid end {self.stop}")
            index = np.searchsorted(self._upper, x, side="left")
        else:
            gaps = np.atleast_1d(np.asarray(complement, dtype=float))
            if np.any(gaps < self.stop_complement * (1 - 1e-9)):
                raise DomainError(f"points closer to 1 than {self.stop_complement:.3e}")
            index = np.searchsorted(-self._upper_gap, -gaps, side="left")
        index = np.clip(index, 0, len(self.panels) - 1)
        local = np.empty_like(x)
        for panel_index in np.unique(index):
            mask = index == panel_index
            panel = self.panels[panel_index]
            y = _inverse(panel.kind, x[mask], None if gaps is None else gaps[mask])
            local[mask] = (y - panel.y_lo) / panel.half_width - 1.0
        return index, np.clip(local, -1.0, 1.0)

    def interpolate(
        self,
        values: np.ndarray,
        x: ArrayLike,
        derivative: int = 0,
        complement: Optional[ArrayLike] = None,
    ) -> np.ndarray:
        """the panel interpolant, or its first or second s-derivative, at arbitrary points"""
        if derivative not in (0, 1, 2):
            raise DomainError(f"derivative order {derivative} is not supported")
        shaped = self.shaped(values)
        index, local = self.locate(x, complement)
        out = np.empty(local.shape, dtype=complex)
        for panel_index in np.unique(index):
            mask = index == panel_index
            panel = self.panels[panel_index]
            coefficients = self.ops.to_coefficients @ shaped[panel_index]
            t = local[mask]
            value = legendre.legval(t, coefficients)
            if derivative == 0:
                out[mask] = value
                continue
            y = panel.y_lo + (t + 1) * panel.half_width
            _s, _c, jac = _map(panel.kind, y)
            dy = legendre.legval(t, legendre.legder(coefficients, 1)) / panel.half_width
            if derivative == 1:
                out[mask] = dy / jac
                continue
            ddy = legendre.legval(t, legendre.legder(coefficients, 2)) / panel.half_width ** 2
            out[mask] = (ddy - _CURVATURE[panel.kind] * dy) / jac ** 2
        return out

    def antiderivative(
        self,
        values: np.ndarray,
        x: ArrayLike,
        backward: bool = False,
        complement: Optional[ArrayLike] = None,
    ) -> np.ndarray:
        """the integral from the grid start to x (or from x to the grid end)"""
        shaped = self.shaped(values)
        totals = np.sum(self.weights * shaped, axis=1)
        before = np.concatenate([[0.0], np.cumsum(totals)])
        after = np.concatenate([np.cumsum(totals[::-1])[::-1], [0.0]])
        index, local = self.locate(x, complement)
        out = np.empty(local.shape, dtype=complex)
        for panel_index in np.unique(index):
            mask = index == panel_index
            panel = self.panels[panel_index]
            weighted = shaped[panel_index] * self.jacobians[panel_index] * panel.half_width
            coefficients = self.ops.to_coefficients @ weighted
            partial = _antiderivative_basis(local[mask], self.order) @ coefficients
            if backward:
                out[mask] = after[panel_index + 1] + (totals[panel_index] - partial)
            else:
                out[mask] = before[panel_index] + partial
        return out


def geometric_log_grid(
    start: float, stop: float, width: float = 1.0, order: int = PANEL_ORDER
) -> PanelGrid:
    """log-mapped panels on [start, stop]"""
    return PanelGrid.uniform(PanelMap.LOG, math.log(start), math.log(stop), width, order)


def endpoint_exp_grid(
    start: float, y_stop: float, width: float, order: int = PANEL_ORDER
) -> PanelGrid:
    """exp-mapped panels from s = start to s = 1 - exp(-y_stop)"""
    return PanelGrid.uniform(PanelMap.EXP, -math.log1p(-start), y_stop, width, order)


def _filon_coefficients(theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Filon's alpha, beta, gamma with a series for small theta"""
    theta = np.abs(np.asarray(theta, dtype=float))
    alpha = np.empty_like(theta)
    beta = np.empty_like(theta)
    gamma = np.empty_like(theta)
    small = theta < 1.0 / 6.0
    ts = theta[small]
    alpha[small] = 2 * ts ** 3 / 45 - 2 * ts ** 5 / 315 + 2 * ts ** 7 / 4725
    beta[small] = 2.0 / 3 + 2 * ts ** 2 / 15 - 4 * ts ** 4 / 105 + 2 * ts ** 6 / 567
    gamma[small] = 4.0 / 3 - 2 * ts ** 2 / 15 + ts ** 4 / 210 - ts ** 6 / 11340
    tb = theta[~small]
    sin_t, cos_t = np.sin(tb), np.cos(tb)
    inv3 = 1.0 / tb ** 3
    alpha[~small] = inv3 * (tb ** 2 + tb * sin_t * cos_t - 2 * sin_t ** 2)
    beta[~small] = 2 * inv3 * (tb * (1 + cos_t ** 2) - 2 * sin_t * cos_t)
    gamma[~small] = 4 * inv3 * (sin_t - tb * cos_t)
    return alpha, beta, gamma


def filon_fourier(values: np.ndarray, x0: float, dx: float, k: ArrayLike) -> np.ndarray:
    """int_{x0}^{x0 + 2n dx} f(x) exp(i k x) dx by Filon's rule

    ``values`` holds f on the 2n + 1 equally spaced points along its first axis;
    any trailing axes are integrated independently.

    :param values: Samples of f, odd length along axis 0
    :type values: numpy.ndarray
    :param x0: The first sample point
    :type x0: float
    :param dx: The spacing
    :type dx: float
    :param k: Frequencies
    :type k: float or numpy.ndarray
    :return: One integral per frequency, shape (len(k),) + values.shape[1:]
    :rtype: numpy.ndarray
    """
    values = np.asarray(values)
    count = values.shape[0]
    if count < 3 or (count - 1) % 2:
        raise DomainError(f"Filon's rule needs an odd number (>= 3) of samples, got {count}")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    alpha, beta, gamma = _filon_coefficients(k * dx)
    sign = np.sign(k)
    x = x0 + dx * np.arange(count)
    phase = np.exp(1j * np.outer(k, x))
    trail = (slice(None),) + (None,) * (values.ndim - 1)
    first, last = values[0], values[-1]
    end_term = (
        1j
        * sign[trail]
        * (first[None, ...] * phase[:, 0][trail] - last[None, ...] * phase[:, -1][trail])
    )
    halved = phase.copy()
    halved[:, 0] *= 0.5
    halved[:, -1] *= 0.5
    even = np.tensordot(halved[:, 0::2], values[0::2], axes=(1, 0))
    odd = np.tensordot(halved[:, 1::2], values[1::2], axes=(1, 0))
    return dx * (alpha[trail] * end_term + beta[trail] * even + gamma[trail] * odd)


def oscillatory_fourier(
    func: Callable[[float], float], a: float, parity: str = "none", limlst: int = 200
) -> complex:
    """int_R exp(i a w) f(w) dw for a real function f on the whole line

    Uses QUADPACK's Fourier integrals on the half line (``weight='cos'`` /
    ``'sin'``), after splitting f into even and odd parts unless ``parity``
    already says which one it is.

    :param func: The real integrand f
    :type func: callable
    :param a: The frequency, nonzero
    :type a: float
    :param parity: 'even', 'odd' or 'none'
    :type parity: str
    :raises QuadratureConvergenceError: When the tail extrapolation does not converge
    :rtype: complex
    """
    if a == 0:
        raise DomainError("the frequency must be nonzero")
    if parity not in ("even", "odd", "none"):
        raise DomainError(f"unknown parity {parity}")
    freq = abs(a)

    def even_part(w: float) -> float:
        return 0.5 * (func(w) + func(-w))

    def odd_part(w: float) -> float:
        return 0.5 * (func(w) - func(-w))

    result = 0.0 + 0.0j
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if parity in ("even", "none"):
                target = func if parity == "even" else even_part
                value, _err = integrate.quad(
                    target, 0.0, np.inf, weight="cos", wvar=freq, limlst=limlst
                )
                result += 2 * value
            if parity in ("odd", "none"):
                target = func if parity == "odd" else odd_part
                value, _err = integrate.quad(
                    target, 0.0, np.inf, weight="sin", wvar=freq, limlst=limlst
                )
                result += 2j * math.copysign(1.0, a) * value
        except integrate.IntegrationWarning as exc:
            raise QuadratureConvergenceError(
                f"Fourier integral at a={a} did not converge: {exc}"
            ) from exc
    return result
