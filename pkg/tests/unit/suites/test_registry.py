""" suite registry unit tests
"""
import pytest

from blowup_lab import suites
from blowup_lab.config import SUITE_NAMES


def test_names():
    """every suite module registers itself"""
    assert suites.names() == [
        "green_verify",
        "kernel_bounds",
        "osc_check",
        "semigroup_verify",
        "spectrum_scan",
        "stability_sweep",
    ]


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_get_by_command_name(name):
    """the command line name and the module name find the same suite"""
    suite = suites.get(name)
    assert suite is suites.get(name.replace("-", "_"))
    assert suite.__module__.endswith(name.replace("-", "_"))


def test_get_unknown():
    """an unknown name is a KeyError"""
    with pytest.raises(KeyError):
        suites.get("spectrum")
