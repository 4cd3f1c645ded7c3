""" :green-verify """
from dataclasses import replace
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from ..coords import RadialField
from ..coords import band_limited_state
from ..coords import norm_lq
from ..errors import DegenerateSpectralParameterError
from ..fitting import loglog_slope
from ..green import GreenKernel
from ..green import bvp_solve_direct
from ..green import green_derivative_jump
from ..green import resolvent_apply
from ..manifest import ReportRow
from ..specfun import SpectralParameter
from ..volterra import PotentialSpec
from ..volterra import build_u_pair
from ._suites import Check
from ._suites import SuiteBase
from ._suites import inside
from ._suites import register
from ._suites import within

# |w0 - 1| is fitted against omega along this abscissa
DECAY_EPS = 0.1

# the two Volterra strategies are compared here
METHOD_LAMBDA = SpectralParameter(eps=0.1, omega=1.0)


def _relative_l2(approx: RadialField, exact: RadialField) -> float:
    return norm_lq(approx - exact, 2.0) / norm_lq(exact, 2.0)


@register
class Suite(SuiteBase):
    """the perturbed fundamental systems, the Green function and the resolvent"""

    KEGEX = r"^green[-_]verify$"

    def __init__(self, context):
        super().__init__(context)
        self._pot = PotentialSpec.linearized()
        self._config = context.volterra_config()

    def checks(self) -> List[Check]:
        return [
            ("C.wronskian", self._wronskian),
            ("C.w0-decay", self._w0_decay),
            ("volterra-methods", self._methods),
            ("F.resolvent", self._resolvent),
            ("F.reassembly", self._reassembly),
            ("jump", self._jump),
        ]

    def _sample(self, lam: SpectralParameter) -> Optional[Tuple[float, float]]:
        try:
            pair = build_u_pair(lam, self._pot, self._config, check=False)
        except DegenerateSpectralParameterError as exc:
            self._logger.info("skipping %s: %s", lam.value, exc)
            return None
        return pair.wronskian_spread(), abs(pair.w0)

    def _wronskian(self) -> List[ReportRow]:
        ctx = self._context
        rng = ctx.rng()
        count = ctx.integer("wronskian-samples")
        omega_max = ctx.number("omega-max")
        lams = [
            SpectralParameter(eps=float(eps), omega=float(omega))
            for eps, omega in zip(
                rng.uniform(0.0, 0.25, count), rng.uniform(-omega_max, omega_max, count)
            )
        ]
        results = [result for result in self.map(self._sample, lams) if result is not None]
        spread = max(result[0] for result in results)
        smallest = min(result[1] for result in results)
        inputs = {"samples": count, "used": len(results), "omega_max": omega_max}
        floor = ctx.number("w0-floor")
        return [
            ReportRow(
                check_id="C.wronskian",
                inputs=inputs,
                measured=spread,
                target=self._config.wronskian_tol,
                status=within(spread, self._config.wronskian_tol),
            ),
            ReportRow(
                check_id="C.w0-floor",
                inputs=inputs,
                measured=smallest,
                target=floor,
                status="pass" if smallest >= floor else "fail",
            ),
        ]

    def _w0_decay(self) -> List[ReportRow]:
        ctx = self._context
        omegas = np.geomspace(4.0, ctx.number("omega-max"), 6)
        lams = [SpectralParameter(eps=DECAY_EPS, omega=float(omega)) for omega in omegas]
        deviations = [abs(build_u_pair(lam, self._pot, self._config).w0 - 1) for lam in lams]
        fit = loglog_slope(omegas, deviations)
        low, high = ctx.number("w0-exponent-min"), ctx.number("w0-exponent-max")
        return [
            ReportRow(
                check_id="C.w0-decay",
                inputs={"eps": DECAY_EPS, "omega": omegas},
                measured=fit.exponent,
                target=[low, high],
                status=inside(fit.exponent, low, high),
            )
        ]

    def _methods(self) -> List[ReportRow]:
        march = build_u_pair(METHOD_LAMBDA, self._pot, replace(self._config, method="march"))
        picard = build_u_pair(METHOD_LAMBDA, self._pot, replace(self._config, method="picard"))
        difference = abs(march.w0 - picard.w0) / abs(march.w0)
        return [
            ReportRow(
                check_id="volterra-methods",
                inputs={"lambda": METHOD_LAMBDA.value},
                measured=difference,
                target=self._config.wronskian_tol,
                status=within(difference, self._config.wronskian_tol),
            )
        ]

    def _resolvent_lambdas(self) -> List[SpectralParameter]:
        pairs = self._context.value("resolvent-lambdas")
        return [SpectralParameter(eps=float(re), omega=float(im)) for re, im in pairs]

    def _resolvent(self) -> List[ReportRow]:
        ctx = self._context
        grid = self.grid()
        rng = ctx.rng()
        count = ctx.integer("resolvent-data")
        data = [band_limited_state(grid, rng, modes=4) for _ in range(count)]
        lams = self._resolvent_lambdas()

        def difference(lam: SpectralParameter) -> float:
            kernel = GreenKernel.build(lam, self._pot, self._config)
            worst = 0.0
            for state in data:
                green = resolvent_apply(state, lam, self._pot, kernel=kernel, guard=ctx.guard)
                direct = bvp_solve_direct(state, lam, self._pot)
                worst = max(worst, _relative_l2(green, direct))
            return worst

        worst = float(max(self.map(difference, lams)))
        tol = ctx.number("resolvent-tol")
        return [
            ReportRow(
                check_id="F.resolvent",
                inputs={"grid_order": grid.order, "lambda": [lam.value for lam in lams]},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            )
        ]

    def _reassembly(self) -> List[ReportRow]:
        points = np.linspace(0.05, 0.95, 7)
        rho, s = (axis.ravel() for axis in np.meshgrid(points, points))
        worst = 0.0
        for lam in self._resolvent_lambdas():
            kernel = GreenKernel.build(lam, self._pot, self._config)
            scale = float(np.max(np.abs(kernel.evaluate(rho, s))))
            worst = max(worst, float(np.max(kernel.reassembly_error(rho, s))) / scale)
        tol = self._context.number("reassembly-tol")
        return [
            ReportRow(
                check_id="F.reassembly",
                inputs={"points": points},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            ),
            ReportRow(
                check_id="cutoff-max-derivative",
                inputs={"delta0": self._config.delta0, "delta1": self._config.delta1},
                measured=kernel.cutoff.max_derivative,
                status="info",
            ),
        ]

    def _jump(self) -> List[ReportRow]:
        kernel = GreenKernel.build(self._resolvent_lambdas()[0], self._pot, self._config)
        points = self._context.numbers("jump-points")
        worst = 0.0
        for s in points:
            expected = -1.0 / (1.0 - s * s)
            worst = max(worst, abs(green_derivative_jump(kernel, s) - expected) / abs(expected))
        tol = self._context.number("jump-tol")
        return [
            ReportRow(
                check_id="jump",
                inputs={"lambda": kernel.lam.value, "s": points},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            )
        ]
