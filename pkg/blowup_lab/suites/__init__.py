""" check suites for the command line """
from typing import Callable

from . import _suites as suites
from ._suites import SuiteContext

names: Callable = suites.names_factory(__package__)
get: Callable = suites.get_factory(__package__)


__all__ = ["SuiteContext", "get", "names"]
