""" exceptions raised by the laboratory

Each error derives from LabError and from the builtin closest to its meaning
so callers can catch either.
"""
from typing import Any
from typing import Optional


class LabError(Exception):
    """base class for every error raised by blowup_lab"""


class DomainError(LabError, ValueError):
    """an argument lies outside the domain of the operation"""


class GridMismatchError(LabError, ValueError):
    """two fields live on different radial grids"""


class GammaPoleError(LabError, ArithmeticError):
    """the gamma function was evaluated at a non-positive integer"""


class HypergeometricDegenerateError(LabError, ArithmeticError):
    """a logarithmic (c - a - b integer) case of 2F1 was requested"""


class ConnectionDegenerateError(LabError, ArithmeticError):
    """the connection coefficient is undefined at this spectral parameter"""


class ContourError(LabError, RuntimeError):
    """the argument principle could not be applied on a contour"""


class KernelIntegrabilityError(LabError, ValueError):
    """the Volterra kernel failed the integrability check"""


class VolterraConvergenceError(LabError, RuntimeError):
    """the Volterra iteration did not converge"""


class DegenerateSpectralParameterError(LabError, ValueError):
    """the free Wronskian W(lambda) vanishes or nearly vanishes"""


class MatchingError(LabError, ArithmeticError):
    """the Wronskian used for matching two branches is nearly singular"""


class WronskianInvariantError(LabError, RuntimeError):
    """the rescaled Wronskian of a fundamental pair is not constant"""


class ResolventSetError(LabError, ValueError):
    """the spectral parameter is too close to the spectrum"""


class ConditioningError(LabError, RuntimeError):
    """a linear system is too ill-conditioned to trust its solution"""

    def __init__(self, msg: str, condition: float):
        super().__init__(msg)
        self.condition = condition


class EigenvalueIsolationError(LabError, RuntimeError):
    """the unstable eigenvalue is not isolated in the discrete spectrum"""


class QuadratureConvergenceError(LabError, RuntimeError):
    """a quadrature did not settle under refinement"""


class EvolutionInstabilityError(LabError, RuntimeError):
    """a time integration grew past its allowed envelope"""

    def __init__(self, msg: str, trajectory: Optional[Any] = None):
        super().__init__(msg)
        self.trajectory = trajectory


class BracketError(LabError, ValueError):
    """the blowup time window does not bracket a sign change"""


class ConfigError(LabError, ValueError):
    """the run configuration is invalid"""


class ReportWriteError(LabError, OSError):
    """an artifact could not be written"""

    def __init__(self, msg: str, path: str):
        super().__init__(f"{msg}: {path}")
        self.path = path
