""" :semigroup-verify """
import math

from typing import List
from typing import Tuple

import numpy as np

from scipy import linalg

from ..coords import C5
from ..coords import ConeConfig
from ..coords import GaussianProfile
from ..coords import RadialField
from ..coords import RadialGrid
from ..coords import StatePair
from ..coords import band_limited_state
from ..coords import cone_strichartz_integral
from ..coords import cylinder_strichartz_integral
from ..coords import cylinder_to_cone
from ..coords import energy_equivalence_envelope
from ..coords import norm_lq
from ..coords import norm_state_H
from ..manifest import ReportRow
from ..semigroup import EIGENMODE
from ..semigroup import ContourSpec
from ..semigroup import LaplaceInverter
from ..semigroup import Trajectory
from ..semigroup import evolution_matrix
from ..semigroup import free_cylinder_evolution
from ..semigroup import linear_evolve
from ..semigroup import riesz_setup
from ..semigroup import weighted_norm_inequalities
from ..volterra import PotentialSpec
from ._suites import Check
from ._suites import SuiteBase
from ._suites import register
from ._suites import within

# deviations below this are round-off, refinement cannot shrink them further
ROUNDOFF_FLOOR = 1e-10


def _relative_l2(approx: RadialField, exact: RadialField) -> float:
    return norm_lq(approx - exact, 2.0) / norm_lq(exact, 2.0)


def _sample_at(trajectory: Trajectory, tau: float) -> StatePair:
    index = int(np.argmin(np.abs(trajectory.times - tau)))
    if not math.isclose(trajectory.times[index], tau, abs_tol=1e-9):
        raise ValueError(f"tau={tau} is not a sample time")
    return trajectory.states[index]


def _eigen_deviation(grid: RadialGrid) -> Tuple[float, float]:
    """distance of the eigenvalue nearest 1 to 1, and of its eigenvector to (2, 5)"""
    size = grid.size
    eigenvalues, vectors = linalg.eig(evolution_matrix(grid))
    index = int(np.argmin(np.abs(eigenvalues - 1.0)))
    vector = vectors[:, index]
    # normalized so that the mean first component is 2
    vector = vector * EIGENMODE[0] / np.mean(vector[:size])
    expected = np.concatenate([np.full(size, EIGENMODE[0]), np.full(size, EIGENMODE[1])])
    return (
        abs(eigenvalues[index] - 1.0),
        float(np.max(np.abs(vector - expected)) / EIGENMODE[1]),
    )


def _psi_profile(tau: float, rho: np.ndarray) -> np.ndarray:
    """a smooth decaying cylinder field around the blowup profile"""
    return C5 + np.exp(-tau) * np.cos(np.pi * np.asarray(rho) / 2)


@register
class Suite(SuiteBase):
    """the growing mode, its projection and the linear flow on the rest"""

    KEGEX = r"^semigroup[-_]verify$"

    def __init__(self, context):
        super().__init__(context)
        self._projection = None

    def checks(self) -> List[Check]:
        return [
            ("B.eigenpair", self._eigenpair),
            ("projection-algebra", self._projection_algebra),
            ("G.consistency", self._consistency),
            ("G.free", self._free),
            ("H.energy", self._energy),
            ("L.envelope", self._envelope),
            ("L.weighted", self._weighted),
            ("L.strichartz-identity", self._strichartz_identity),
        ]

    @property
    def projection(self):
        """the projection on the context grid, set up once"""
        if self._projection is None:
            self._projection = riesz_setup(self.grid())
        return self._projection

    def _stable_state(self, rng: np.random.Generator) -> StatePair:
        return self.projection.complement(band_limited_state(self.grid(), rng, modes=4))

    def _eigenpair(self) -> List[ReportRow]:
        ctx = self._context
        tol = ctx.number("eigen-tol")
        orders = [ctx.grid_order, ctx.integer("refined-order")]
        deviations = [
            _eigen_deviation(self.grid(order)) for order in orders
        ]
        coarse, fine = (max(pair) for pair in deviations)
        gain = coarse / fine if fine > 0 else math.inf
        below_floor = max(coarse, fine) < ROUNDOFF_FLOOR
        refined = gain >= ctx.number("refinement-gain") or below_floor
        return [
            ReportRow(
                check_id="B.eigenvalue",
                inputs={"grid_order": orders[0]},
                measured=deviations[0][0],
                target=tol,
                status=within(deviations[0][0], tol),
            ),
            ReportRow(
                check_id="B.eigenvector",
                inputs={"grid_order": orders[0]},
                measured=deviations[0][1],
                target=tol,
                status=within(deviations[0][1], tol),
            ),
            ReportRow(
                check_id="B.refinement",
                inputs={
                    "grid_orders": orders,
                    "deviations": [coarse, fine],
                    "roundoff_floor": ROUNDOFF_FLOOR,
                    "below_floor": below_floor,
                },
                measured=gain,
                target=ctx.number("refinement-gain"),
                status="pass" if refined else "fail",
            ),
        ]

    def _projection_algebra(self) -> List[ReportRow]:
        projection = self.projection
        state = band_limited_state(self.grid(), self._context.rng(), modes=4)
        once = projection.apply(state)
        twice = projection.apply(once)
        errors = [
            norm_state_H(twice - once) / max(norm_state_H(once), 1e-300),
            abs(projection.coefficient(projection.g) - 1.0),
            norm_state_H(projection.complement(projection.g)) / norm_state_H(projection.g),
        ]
        worst = float(max(errors))
        return [
            ReportRow(
                check_id="projection-algebra",
                inputs={"grid_order": self.grid().order},
                measured=worst,
                target=1e-10,
                status=within(worst, 1e-10),
            ),
            ReportRow(
                check_id="projection-gap",
                inputs={"eigenvalue": projection.eigenvalue},
                measured=projection.gap,
                status="info",
            ),
        ]

    def _consistency(self) -> List[ReportRow]:
        ctx = self._context
        taus = ctx.numbers("taus")
        tol = ctx.number("consistency-tol")
        state = self._stable_state(ctx.rng())
        contour = ContourSpec(eps=ctx.number("contour-eps"), omega_max=ctx.number("omega-max"))
        inverter = LaplaceInverter(self.grid(), contour=contour, projection=self.projection)
        inverted = inverter.invert(state, [0.0] + taus)
        trajectory = linear_evolve(state, max(taus))
        identity = _relative_l2(inverted[0], state.first)
        worst = max(
            _relative_l2(field, _sample_at(trajectory, tau).first)
            for tau, field in zip(taus, inverted[1:])
        )
        return [
            ReportRow(
                check_id="G.identity",
                inputs={"tau": 0.0},
                measured=identity,
                target=tol,
                status=within(identity, tol),
            ),
            ReportRow(
                check_id="G.consistency",
                inputs={"taus": taus, "eps": contour.eps, "omega_max": contour.omega_max},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            ),
            ReportRow(
                check_id="G.tail-change",
                inputs={"taus": taus},
                measured=max(inverter.last_tail_change.values()),
                target=10 * contour.tol,
                status="info",
            ),
        ]

    def _free(self) -> List[ReportRow]:
        ctx = self._context
        grid = self.grid()
        profile = GaussianProfile()
        blowup_time = ctx.number("free-blowup-time")
        taus = ctx.numbers("free-taus")
        initial = free_cylinder_evolution(profile, blowup_time, 0.0, grid)
        trajectory = linear_evolve(initial, max(taus), pot=PotentialSpec.zero())
        worst = max(
            _relative_l2(
                _sample_at(trajectory, tau).first,
                free_cylinder_evolution(profile, blowup_time, tau, grid).first,
            )
            for tau in taus
        )
        tol = ctx.number("consistency-tol")
        return [
            ReportRow(
                check_id="G.free",
                inputs={"T": blowup_time, "taus": taus},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            )
        ]

    def _energy(self) -> List[ReportRow]:
        ctx = self._context
        rng = ctx.rng()
        states = [self._stable_state(rng) for _ in range(ctx.integer("energy-samples"))]
        tau_max = ctx.number("energy-tau-max")
        trajectories = self.map(lambda state: linear_evolve(state, tau_max), states)
        slope = max(trajectory.growth_rate().exponent for trajectory in trajectories)
        growth = max(trajectory.growth() for trajectory in trajectories)
        inputs = {"samples": len(states), "tau_max": tau_max}
        return [
            ReportRow(
                check_id="H.energy-slope",
                inputs=inputs,
                measured=slope,
                target=ctx.number("energy-slope"),
                status=within(slope, ctx.number("energy-slope")),
            ),
            ReportRow(
                check_id="H.energy-growth",
                inputs=inputs,
                measured=growth,
                target=ctx.number("energy-growth"),
                status=within(growth, ctx.number("energy-growth")),
            ),
        ]

    def _corpus(self, order: int) -> List[StatePair]:
        rng = self._context.rng()
        grid = self.grid(order)
        size = self._context.integer("corpus-size")
        return [band_limited_state(grid, rng, modes=6) for _ in range(size)]

    def _envelope(self) -> List[ReportRow]:
        order = self._context.grid_order
        coarse = energy_equivalence_envelope(self._corpus(order))
        fine = energy_equivalence_envelope(self._corpus(2 * order))
        drift = max(abs(a - b) / abs(b) for a, b in zip(coarse, fine))
        limit = self._context.number("envelope-drift")
        return [
            ReportRow(
                check_id="L.envelope",
                inputs={"grid_orders": [order, 2 * order]},
                measured=drift,
                target=limit,
                status=within(drift, limit),
            ),
            ReportRow(
                check_id="L.envelope-bounds",
                inputs={"grid_order": 2 * order},
                measured=list(fine),
                status="info",
            ),
        ]

    def _weighted(self) -> List[ReportRow]:
        reports = [weighted_norm_inequalities(state.first) for state in self._corpus(0)]
        l2 = max(report.l2_ratio for report in reports)
        l5 = max(report.l5_ratio for report in reports)
        rough = sum(report.near_extremal for report in reports)
        finite = math.isfinite(l2) and math.isfinite(l5)
        return [
            ReportRow(
                check_id="L.weighted",
                inputs={"corpus": len(reports), "near_extremal": rough},
                measured=[l2, l5],
                status="pass" if finite else "fail",
            )
        ]

    def _strichartz_identity(self) -> List[ReportRow]:
        cfg = ConeConfig(T=1.0)
        tau_max = 2.0
        grid = self.grid()
        cylinder = cylinder_strichartz_integral(_psi_profile, tau_max, grid)
        t_max = cfg.T * (1 - math.exp(-tau_max))
        cone = cone_strichartz_integral(cylinder_to_cone(_psi_profile, cfg), cfg, t_max, grid)
        difference = abs(cylinder - cone) / abs(cylinder)
        tol = self._context.number("identity-tol")
        return [
            ReportRow(
                check_id="L.strichartz-identity",
                inputs={"T": cfg.T, "tau_max": tau_max},
                measured=difference,
                target=tol,
                status=within(difference, tol),
            )
        ]
