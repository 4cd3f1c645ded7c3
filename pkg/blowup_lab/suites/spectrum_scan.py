""" :spectrum-scan """
import math

from typing import List

import numpy as np

from ..manifest import ReportRow
from ..specfun import ComplexRectangle
from ..specfun import Phi0Representation
from ..specfun import SpectralParameter
from ..specfun import connection_coefficients_at_zero
from ..specfun import h0
from ..specfun import h0_tilde
from ..specfun import h1
from ..specfun import nondegeneracy_integral
from ..specfun import phi0_via_representation
from ..specfun import spectrum_scan
from ._suites import Check
from ._suites import SuiteBase
from ._suites import register
from ._suites import within

# the hypergeometric identity is checked at these points
CONNECTION_POINTS = (0.3, 0.5, 0.7)


@register
class Suite(SuiteBase):
    """the growing eigenvalue and the hypergeometric identities behind it"""

    KEGEX = r"^spectrum[-_]scan$"

    def checks(self) -> List[Check]:
        return [
            ("A.spectrum", self._spectrum),
            ("D.connection", self._connection),
            ("E.phi0", self._phi0),
            ("nondegeneracy", self._nondegeneracy),
        ]

    def _spectrum(self) -> List[ReportRow]:
        ctx = self._context
        rect = ComplexRectangle(
            ctx.number("re-min"), ctx.number("re-max"), ctx.number("im-min"), ctx.number("im-max")
        )
        tol = ctx.number("zero-tol")
        zeros = spectrum_scan(rect, resolution=ctx.integer("resolution"), tol=tol)
        self._logger.info("spectrum scan found %s zero(s)", len(zeros))
        inputs = {
            "rectangle": [rect.re_min, rect.re_max, rect.im_min, rect.im_max],
            "resolution": ctx.integer("resolution"),
        }
        count = sum(zero.multiplicity for zero in zeros)
        distance = abs(zeros[0].location - 1.0) if len(zeros) == 1 else math.inf
        return [
            ReportRow(
                check_id="A.zero-count",
                inputs=inputs,
                measured=count,
                target=1,
                status="pass" if count == 1 else "fail",
            ),
            ReportRow(
                check_id="A.spectrum",
                inputs=dict(inputs, locations=[zero.location for zero in zeros]),
                measured=distance,
                target=tol,
                status=within(distance, tol),
            ),
        ]

    def _connection_error(self, lam: complex) -> float:
        first, second = connection_coefficients_at_zero(lam)
        worst = 0.0
        for z in CONNECTION_POINTS:
            exact = h1(z, lam)
            combined = first * h0(z, lam) + second * h0_tilde(z, lam)
            worst = max(worst, abs(exact - combined) / abs(exact))
        return worst

    def _connection(self) -> List[ReportRow]:
        ctx = self._context
        rng = ctx.rng()
        count = ctx.integer("connection-samples")
        eps = rng.uniform(0.05, 0.25, count)
        omega = rng.uniform(-5.0, 5.0, count)
        lams = [complex(e, w) for e, w in zip(eps, omega)]
        errors = self.map(self._connection_error, lams)
        worst = float(max(errors))
        tol = ctx.number("connection-tol")
        return [
            ReportRow(
                check_id="D.connection",
                inputs={"samples": count, "z": list(CONNECTION_POINTS)},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            )
        ]

    def _phi0(self) -> List[ReportRow]:
        ctx = self._context
        size = ctx.integer("phi0-points")
        rhos = np.linspace(0.1, 0.9, size)
        lams = [
            SpectralParameter(eps=eps, omega=omega)
            for eps, omega in zip(np.linspace(0.05, 0.25, size), np.linspace(-4.0, 4.0, size))
        ]

        def spread(lam: SpectralParameter) -> float:
            values = [phi0_via_representation(rhos, lam, rep) for rep in Phi0Representation]
            scale = np.maximum(np.abs(values[0]), 1e-300)
            return float(
                max(
                    np.max(np.abs(a - b) / scale)
                    for k, a in enumerate(values)
                    for b in values[k + 1 :]
                )
            )

        worst = float(max(self.map(spread, lams)))
        tol = ctx.number("phi0-tol")
        return [
            ReportRow(
                check_id="E.phi0",
                inputs={"rho": rhos, "lambda": [lam.value for lam in lams]},
                measured=worst,
                target=tol,
                status=within(worst, tol),
            )
        ]

    def _nondegeneracy(self) -> List[ReportRow]:
        value = nondegeneracy_integral()
        exact = math.pi / 32
        return [
            ReportRow(
                check_id="nondegeneracy",
                measured=value,
                target=exact,
                status=within(abs(value - exact) / exact, 1e-10),
            )
        ]
