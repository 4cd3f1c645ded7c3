""" :osc-check """
from typing import Callable
from typing import List

import numpy as np

from ..errors import ConfigError
from ..manifest import ReportRow
from ..semigroup import SYMBOL_FAMILIES
from ..semigroup import osc_decay_check
from ..semigroup import small_frequency_exponent
from ..semigroup import symbol_family
from ._suites import Check
from ._suites import SuiteBase
from ._suites import SuiteContext
from ._suites import register
from ._suites import within


@register
class Suite(SuiteBase):
    """decay of oscillatory integrals over the symbol catalog"""

    KEGEX = r"^osc[-_]check$"

    @classmethod
    def validate(cls, context: SuiteContext) -> None:
        super().validate(context)
        unknown = [name for name in context.value("families") if name not in SYMBOL_FAMILIES]
        if unknown:
            raise ConfigError(f"osc-check: unknown symbol families {unknown}")

    def checks(self) -> List[Check]:
        checks: List[Check] = [
            (f"J.decay-{name}", self._decay_check(name)) for name in self._context.value("families")
        ]
        checks.append(("J.small-a", self._small_a))
        return checks

    def _decay_check(self, name: str) -> Callable[[], List[ReportRow]]:
        return lambda: self._decay(name)

    def _decay(self, name: str) -> List[ReportRow]:
        ctx = self._context
        frequencies = np.geomspace(
            ctx.number("a-min"), ctx.number("a-max"), ctx.integer("a-points")
        )
        alphas = ctx.numbers("alphas") if name == "even_power" else [0.9]
        rows = []
        for alpha in alphas:
            ratios = self.map(
                lambda a, alpha=alpha: osc_decay_check(name, float(a), alpha=alpha), frequencies
            )
            worst = float(max(ratios))
            limit = ctx.number("ratio-limit")
            check_id = f"J.decay-{name}"
            if name == "even_power":
                check_id = f"{check_id}-alpha-{alpha:g}"
            rows.append(
                ReportRow(
                    check_id=check_id,
                    inputs={"a": frequencies, "alpha": alpha},
                    measured=worst,
                    target=limit,
                    status=within(worst, limit),
                )
            )
        return rows

    def _small_a(self) -> List[ReportRow]:
        ctx = self._context
        frequencies = ctx.numbers("small-a")
        tol = ctx.number("exponent-tol")
        rows = []
        for alpha in ctx.numbers("alphas"):
            fit = small_frequency_exponent(symbol_family("even_power", alpha), frequencies)
            expected = alpha - 1
            rows.append(
                ReportRow(
                    check_id=f"J.small-a-alpha-{alpha:g}",
                    inputs={"a": frequencies, "alpha": alpha},
                    measured=fit.exponent,
                    target=expected,
                    status="pass" if abs(fit.exponent - expected) <= tol else "fail",
                )
            )
        return rows
