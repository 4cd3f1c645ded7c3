""" :stability-sweep """
import math

from typing import Dict
from typing import List
from typing import Optional

import numpy as np

from ..errors import BracketError
from ..errors import EvolutionInstabilityError
from ..evolve import BlowupTimeTuner
from ..evolve import ExperimentConfig
from ..evolve import StabilityReport
from ..evolve import nonlinearity
from ..evolve import nonlinearity_constant
from ..manifest import ReportRow
from ..semigroup import ProjectionData
from ..semigroup import riesz_setup
from ._suites import Check
from ._suites import SuiteBase
from ._suites import SuiteContext
from ._suites import inside
from ._suites import register

# keys of the section that steer the sweep rather than one experiment
SWEEP_KEYS = (
    "deltas",
    "detune",
    "detune-gain",
    "ratio-min",
    "ratio-max",
    "t-star-min",
    "t-star-max",
)


def experiment_config(context: SuiteContext) -> ExperimentConfig:
    """the experiment the section describes, at the first delta

    :raises ConfigError: On unknown keys or invalid values
    """
    mapping = {key: value for key, value in context.section.items() if key not in SWEEP_KEYS}
    numeric = ("window", "tau-max", "sample-dt", "blow-past", "t-tol", "coefficient-tol")
    for key in numeric:
        mapping[key] = context.number(key)
    for key in ("grid-order", "modes"):
        mapping[key] = context.integer(key)
    if mapping.get("dt") is not None:
        mapping["dt"] = context.number("dt")
    return ExperimentConfig.from_mapping(
        mapping, seed=context.seed, delta=context.numbers("deltas")[0]
    )


@register
class Suite(SuiteBase):
    """nonlinear runs from perturbed blowup data, tuned in T"""

    KEGEX = r"^stability[-_]sweep$"

    def __init__(self, context):
        super().__init__(context)
        self._cfg = experiment_config(context)
        self._tuners: Dict[float, BlowupTimeTuner] = {}
        self._reports: Dict[float, Optional[StabilityReport]] = {}
        self._projection: Optional[ProjectionData] = None

    @classmethod
    def validate(cls, context: SuiteContext) -> None:
        super().validate(context)
        experiment_config(context)
        for key in SWEEP_KEYS[1:]:
            context.number(key)

    def checks(self) -> List[Check]:
        return [
            ("K.tuning", self._tuning),
            ("K.ratio", self._ratios),
            ("K.detune", self._detune),
            ("largest-delta", self._largest),
            ("nonlinearity", self._nonlinearity),
        ]

    def _deltas(self) -> List[float]:
        return self._context.numbers("deltas")

    def _tune(self, delta: float) -> Optional[StabilityReport]:
        cfg = self._cfg.with_delta(delta)
        grid = self.grid(cfg.grid_order)
        if self._projection is None:
            self._projection = riesz_setup(grid)
        tuner = BlowupTimeTuner(cfg, grid=grid, projection=self._projection)
        self._tuners[delta] = tuner
        try:
            return tuner.report(tuner.tune())
        except (BracketError, EvolutionInstabilityError) as exc:
            self._logger.warning("delta=%.3e could not be tuned: %s", delta, exc)
            return None

    def _tuning(self) -> List[ReportRow]:
        ctx = self._context
        low, high = ctx.number("t-star-min"), ctx.number("t-star-max")
        rows = []
        for delta in self._deltas():
            report = self._tune(delta)
            self._reports[delta] = report
            if report is None:
                measured, status, strichartz = math.nan, "fail", math.nan
            else:
                measured, strichartz = report.T_star, report.strichartz_integral
                status = inside(measured, low, high) if report.converged else "fail"
            rows.append(
                ReportRow(
                    check_id=f"K.delta-{delta:g}",
                    inputs={"delta": delta, "window": list(self._cfg.t_window)},
                    measured=measured,
                    target=[low, high],
                    status=status,
                    extra={"delta": delta, "T_star": measured, "strichartz_integral": strichartz},
                )
            )
            if report is not None:
                rows.append(
                    ReportRow(
                        check_id=f"K.delta-{delta:g}.correction",
                        inputs={"delta": delta},
                        measured=[report.correction_norm, report.correction_tail],
                        status="info",
                    )
                )
        return rows

    def _ratios(self) -> List[ReportRow]:
        ctx = self._context
        low, high = ctx.number("ratio-min"), ctx.number("ratio-max")
        deltas = sorted(self._deltas(), reverse=True)
        rows = []
        for large, small in zip(deltas, deltas[1:]):
            first, second = self._reports.get(large), self._reports.get(small)
            if first is None or second is None or second.strichartz_integral == 0:
                ratio = math.nan
            else:
                ratio = first.strichartz_integral / second.strichartz_integral
            halved = math.isclose(large / small, 2.0, rel_tol=1e-9)
            rows.append(
                ReportRow(
                    check_id=f"K.ratio-{large:g}-{small:g}",
                    inputs={"deltas": [large, small]},
                    measured=ratio,
                    target=[low, high] if halved else None,
                    status=inside(ratio, low, high) if halved else "info",
                    extra={"ratio": ratio},
                )
            )
        return rows

    def _detune(self) -> List[ReportRow]:
        ctx = self._context
        shift = ctx.number("detune")
        gain = ctx.number("detune-gain")
        rows = []
        for delta in self._deltas():
            report = self._reports.get(delta)
            if report is None:
                rows.append(
                    ReportRow(
                        check_id=f"K.detune-{delta:g}",
                        inputs={"delta": delta},
                        measured="no tuned run",
                        status="fail",
                    )
                )
                continue
            tuner = self._tuners[delta]
            tuned = abs(tuner.coefficient(report.T_star))
            detuned = min(
                abs(tuner.coefficient(report.T_star - shift)),
                abs(tuner.coefficient(report.T_star + shift)),
            )
            measured = detuned / tuned if tuned > 0 else math.inf
            bounded = report.converged and math.isfinite(report.sup_H_norm)
            rows.append(
                ReportRow(
                    check_id=f"K.detune-{delta:g}",
                    inputs={"delta": delta, "T_star": report.T_star, "shift": shift},
                    measured=measured,
                    target=gain,
                    status="pass" if bounded and measured >= gain else "fail",
                )
            )
        return rows

    def _largest(self) -> List[ReportRow]:
        tunable = [
            delta for delta, report in self._reports.items() if report and report.converged
        ]
        return [
            ReportRow(
                check_id="largest-delta",
                inputs={"deltas": self._deltas()},
                measured=max(tunable) if tunable else None,
                status="info",
            )
        ]

    def _nonlinearity(self) -> List[ReportRow]:
        points = np.linspace(-1.0, 1.0, 401)
        constant = nonlinearity_constant(points)
        at_zero = abs(float(nonlinearity(0.0)))
        return [
            ReportRow(
                check_id="nonlinearity",
                inputs={"points": [points[0], points[-1], points.size]},
                measured=[at_zero, constant],
                status="pass" if at_zero < 1e-12 and math.isfinite(constant) else "fail",
            )
        ]
