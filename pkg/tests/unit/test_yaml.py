""" tests for the yaml loader
"""
import pytest

from blowup_lab.yaml import SafeLoader
from blowup_lab.yaml import yaml


def test_check_yaml_imports():
    """the loader is importable whichever backend is present"""
    assert yaml is not None
    assert SafeLoader is not None


@pytest.mark.parametrize(
    "text, expected",
    [
        ("delta: 1.0e-2", 1.0e-2),
        ("delta: 0.01", 0.01),
        ("delta: 1e-2", "1e-2"),
        ("delta: 7", 7),
    ],
    ids=["float with a dot", "plain float", "yaml 1.1 reads this as a string", "integer"],
)
def test_numbers_in_config_files(text, expected):
    """the suites coerce strings themselves, the loader does not"""
    assert yaml.load(text, Loader=SafeLoader)["delta"] == expected


def test_loader_is_safe():
    """python object tags are refused"""
    with pytest.raises(yaml.YAMLError):
        yaml.load("seed: !!python/object/apply:os.getcwd []", Loader=SafeLoader)
