""" the suite registry and what every suite shares """

import functools
import importlib
import logging
import re
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Callable
from typing import Dict
from typing import Iterable
from typing import List
from typing import Set
from typing import Tuple

import numpy as np

from ..config import SUITE_NAMES
from ..coords import RadialGrid
from ..errors import ConfigError
from ..errors import LabError
from ..manifest import ReportRow
from ..utils import seeded_generator
from ..volterra import VolterraConfig

try:
    from importlib.resources import files
except ImportError:
    from importlib_resources import files  # type: ignore

# Basic structure for storing information about one suite
SuiteT = namedtuple("SuiteT", ("name", "cls", "kegex"))

# Dictionary with information about all registered suites
_SUITES: Dict[str, Dict] = {}


def register(cls: Any) -> Any:
    """Decorator for registering a new suite"""
    package, _, suite = cls.__module__.rpartition(".")
    pkg_info = _SUITES.setdefault(package, {})
    pkg_info[suite] = SuiteT(name=suite, cls=cls, kegex=re.compile(cls.KEGEX))
    return cls


def names(package: str) -> List:
    """List all suites in one package"""
    _import_all(package)
    return sorted(_SUITES[package])


def get(package: str, name: str) -> Callable:
    """Get the suite whose kegex matches a command line name"""
    _import_all(package)
    for suite in _SUITES[package].values():
        if suite.kegex.match(name):
            return suite.cls
    raise KeyError(name)


def _import(package: str, suite: str) -> None:
    """Import the given suite file from a package"""
    importlib.import_module(f"{package}.{suite}")


def _import_all(package: str) -> None:
    """Import all suites in a package"""
    entries = [entry.name for entry in files(package).iterdir()]
    suites = [f[:-3] for f in entries if f.endswith(".py") and f[0] != "_"]
    for suite in suites:
        _import(package, suite)


def names_factory(package: str) -> Callable:
    """Create a names() function for one package"""
    return functools.partial(names, package)


def get_factory(package: str) -> Callable:
    """Create a get() function for one package"""
    return functools.partial(get, package)


@dataclass
class SuiteContext:  # pylint: disable=too-many-instance-attributes
    """the settings one suite runs with"""

    name: str
    grid_order: int
    seed: int
    parallelism: int
    section: Dict[str, Any]
    numerics: Dict[str, Any]
    overrides: Dict[str, Any] = field(default_factory=dict)

    @property
    def stream(self) -> int:
        """the fixed random stream of this suite"""
        return SUITE_NAMES.index(self.name) + 1

    def rng(self) -> np.random.Generator:
        """a fresh generator on the suite's stream"""
        return seeded_generator(self.seed, self.stream)

    def value(self, key: str) -> Any:
        """a section setting, a command line override wins"""
        return self.overrides.get(key, self.section[key])

    def number(self, key: str) -> float:
        """a section setting as a float

        :raises ConfigError: When the value is not a number
        """
        value = self.value(key)
        try:
            return float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{self.name}: '{key}' must be a number, got {value!r}") from exc

    def integer(self, key: str) -> int:
        """a section setting as an int"""
        value = self.number(key)
        if value != int(value):
            raise ConfigError(f"{self.name}: '{key}' must be an integer, got {value}")
        return int(value)

    def numbers(self, key: str) -> List[float]:
        """a list setting as floats"""
        value = self.value(key)
        if not isinstance(value, list):
            raise ConfigError(f"{self.name}: '{key}' must be a list, got {value!r}")
        try:
            return [float(item) for item in value]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{self.name}: '{key}' must hold numbers, got {value!r}") from exc

    def volterra_config(self) -> VolterraConfig:
        """the Volterra and matching settings of the numerics section"""
        numerics = self.numerics
        try:
            return VolterraConfig(
                delta0=float(numerics["delta0"]),
                delta1=float(numerics["delta1"]),
                tol=float(numerics["volterra-tol"]),
                max_iter=int(numerics["volterra-max-iter"]),
                wronskian_tol=float(numerics["wronskian-tol"]),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid numerics section: {exc}") from exc

    @property
    def guard(self) -> float:
        """the exclusion radius around known eigenvalues"""
        try:
            return float(self.numerics["spectrum-guard"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid spectrum-guard: {exc}") from exc


Check = Tuple[str, Callable[[], List[ReportRow]]]


class SuiteBase:
    """a named list of checks

    A check returns its rows; a LabError inside it becomes one fail row
    carrying the error text and the run moves on. ConfigError is not caught.
    """

    KEGEX = r"^$"

    def __init__(self, context: SuiteContext):
        self._context = context
        self._grids: Dict[int, RadialGrid] = {}
        self.grid_orders: Set[int] = set()
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @classmethod
    def validate(cls, context: SuiteContext) -> None:
        """raise ConfigError on settings the suite cannot use"""
        context.volterra_config()

    def checks(self) -> List[Check]:
        """(check id, callable) pairs in run order"""
        raise NotImplementedError

    def grid(self, order: int = 0) -> RadialGrid:
        """the cached collocation grid, the context order by default"""
        order = order or self._context.grid_order
        if order not in self._grids:
            self._grids[order] = RadialGrid(order)
        self.grid_orders.add(order)
        return self._grids[order]

    def map(self, func: Callable, items: Iterable) -> List:
        """func over items, on worker threads when parallelism > 1, in input order"""
        items = list(items)
        if self._context.parallelism > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self._context.parallelism) as executor:
                return list(executor.map(func, items))
        return [func(item) for item in items]

    def run(self) -> List[ReportRow]:
        """every check, in order"""
        rows: List[ReportRow] = []
        for check_id, check in self.checks():
            self._logger.info("running %s", check_id)
            try:
                produced = check()
            except ConfigError:
                raise
            except LabError as exc:
                self._logger.warning("%s failed: %s", check_id, exc)
                produced = [
                    ReportRow(
                        check_id=check_id,
                        measured=f"{exc.__class__.__name__}: {exc}",
                        status="fail",
                    )
                ]
            for row in produced:
                self._logger.debug("%s: %s", row.check_id, row.status)
            rows.extend(produced)
        return rows


def within(value: float, limit: float) -> str:
    """pass when a finite value is at most limit"""
    return "pass" if np.isfinite(value) and value <= limit else "fail"


def inside(value: float, low: float, high: float) -> str:
    """pass when value lies in [low, high]"""
    return "pass" if np.isfinite(value) and low <= value <= high else "fail"
