import os

import pytest

from ._common import LabRunTest

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures", "integration")


@pytest.fixture(name="lab")
def fixture_lab(tmp_path, monkeypatch):
    """a runner that ignores any config file on the machine"""
    monkeypatch.delenv("BLOWUP_LAB_CONFIG", raising=False)
    monkeypatch.chdir(tmp_path)
    return LabRunTest(str(tmp_path))


@pytest.fixture(name="lab_config")
def fixture_lab_config(tmp_path, monkeypatch):
    """a runner on the reduced resolution config"""
    monkeypatch.delenv("BLOWUP_LAB_CONFIG", raising=False)
    monkeypatch.chdir(tmp_path)
    return LabRunTest(str(tmp_path), os.path.join(FIXTURES_DIR, "blowup-lab.yml"))
