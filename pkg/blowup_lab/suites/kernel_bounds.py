""" :kernel-bounds """
import math

from typing import Callable
from typing import List

import numpy as np

from ..fitting import loglog_slope
from ..manifest import ReportRow
from ..semigroup import KernelBoundStudy
from ..semigroup import KernelQuadrature
from ..volterra import PotentialSpec
from ._suites import Check
from ._suites import SuiteBase
from ._suites import register
from ._suites import within


@register
class Suite(SuiteBase):
    """the omega integrals of the six Green function pieces against their bound"""

    KEGEX = r"^kernel[-_]bounds$"

    def __init__(self, context):
        super().__init__(context)
        ctx = self._context
        # the refinement change is judged against refine-tol here, not inside measure
        self._quad = KernelQuadrature(
            omega_max=ctx.number("omega-max"),
            n_omega=ctx.integer("n-omega"),
            rho_nodes=ctx.integer("rho-nodes"),
            refine_tol=math.inf,
        )
        self._study = KernelBoundStudy(
            PotentialSpec.linearized(), self._quad, ctx.volterra_config()
        )

    def checks(self) -> List[Check]:
        pieces = [int(n) for n in self._context.numbers("pieces")]
        return [(f"I.piece-{n}", self._piece_check(n)) for n in pieces]

    def _piece_check(self, n: int) -> Callable[[], List[ReportRow]]:
        return lambda: self._piece(n)

    def _decay(self, n: int) -> float:
        """the log-log slope of the un-normalized norm in tau at fixed s"""
        ctx = self._context
        taus = ctx.numbers("taus")
        s = ctx.number("decay-s")
        norms = np.array([self._study.norm(n, tau, s) for tau in taus])
        if np.all(norms == 0):
            return -math.inf
        if np.any(norms == 0):
            return math.nan
        return loglog_slope(taus, norms).exponent

    def _piece(self, n: int) -> List[ReportRow]:
        ctx = self._context
        eps_check = ctx.number("eps-check")
        taus = ctx.numbers("taus")
        s_values = ctx.numbers("s-values")
        results = [
            self._study.measure(n, tau, s, eps_check=eps_check) for tau in taus for s in s_values
        ]
        inputs = {"n": n, "taus": taus, "s": s_values}
        ratio = max(result.ratio for result in results)
        change = max(result.refinement_change for result in results)
        eps_change = max(result.eps_change for result in results)
        refine_tol = ctx.number("refine-tol")
        exponent = self._decay(n)
        limit = ctx.number("decay-exponent")
        self._logger.info("G_%s: max ratio %.3e, decay exponent %.3f", n, ratio, exponent)
        return [
            ReportRow(
                check_id=f"I.piece-{n}.ratio",
                inputs=inputs,
                measured=ratio,
                status="pass" if math.isfinite(ratio) else "fail",
            ),
            ReportRow(
                check_id=f"I.piece-{n}.refinement",
                inputs=dict(inputs, n_omega=self._quad.n_omega),
                measured=change,
                target=refine_tol,
                status=within(change, refine_tol),
            ),
            ReportRow(
                check_id=f"I.piece-{n}.decay",
                inputs={"n": n, "taus": taus, "s": ctx.number("decay-s")},
                measured=exponent,
                target=limit,
                status="pass" if exponent == -math.inf else within(exponent, limit),
            ),
            ReportRow(
                check_id=f"I.piece-{n}.eps-shift",
                inputs=dict(inputs, eps=eps_check),
                measured=eps_change,
                status="info",
            ),
        ]
