""" tests for the utilities in utils
"""
import os
import stat

from types import SimpleNamespace
from typing import Any
from typing import List
from typing import Optional

import numpy as np
import pytest

import blowup_lab.utils as utils


@pytest.mark.parametrize(
    "value, anticpated_result",
    [
        (None, []),
        ("", []),
        ("1e-2", ["1e-2"]),
        ("1e-2, 5e-3,,", ["1e-2", "5e-3"]),
        ([0.1, 0.2], [0.1, 0.2]),
        (0.1, [0.1]),
    ],
    ids=[
        "none",
        "empty string",
        "single value",
        "comma delimited with blanks",
        "list untouched",
        "scalar",
    ],
)
def test_to_list(value: Any, anticpated_result: List) -> None:
    """test to_list"""
    assert utils.to_list(value) == anticpated_result


@pytest.mark.parametrize(
    "seconds, anticpated_result",
    [
        (0.4, "0s"),
        (59, "59s"),
        (61, "1m1s"),
        (3661, "1h1m1s"),
        (90061, "1d1h1m1s"),
        (-61, "-1m1s"),
    ],
)
def test_human_time(seconds: float, anticpated_result: str) -> None:
    """test human_time"""
    assert utils.human_time(seconds) == anticpated_result


def test_templar() -> None:
    """a template renders, a broken one returns its error"""
    assert utils.templar("{{ seed }} runs", {"seed": 7}) == "7 runs"
    assert "undefined" in utils.templar("{{ missing }}", {})


def test_seeded_generator_streams() -> None:
    """same seed and stream repeat, other streams differ"""
    first = utils.seeded_generator(7, 2).standard_normal(8)
    again = utils.seeded_generator(7, 2).standard_normal(8)
    other = utils.seeded_generator(7, 3).standard_normal(8)
    other_seed = utils.seeded_generator(8, 2).standard_normal(8)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    assert not np.array_equal(first, other_seed)


def test_seeded_generator_full_width_seed() -> None:
    """the largest 64 bit seed is accepted"""
    value = utils.seeded_generator(2 ** 64 - 1).random()
    assert 0.0 <= value < 1.0


def test_get_conf_path_allowed_extension_failed(monkeypatch) -> None:
    """test get_conf_path"""

    def check_path_exists(arg):
        return arg in [
            "/etc/blowup-lab/blowup-lab.yaml",
            "/etc/blowup-lab/blowup-lab.yml",
            "/etc/blowup-lab/blowup-lab.json",
        ]

    monkeypatch.setattr(os.path, "exists", check_path_exists)

    with pytest.raises(SystemExit) as exc:
        utils.get_conf_path("blowup-lab", allowed_extensions=["json", "yaml", "yml"])
    assert exc.value.code == 2


def test_get_conf_path_allowed_extension_passed(monkeypatch) -> None:
    """test get_conf_path"""

    expected_config_file_path = os.path.expanduser("~/.config/blowup-lab/blowup-lab.yaml")

    def check_path_exists(arg):
        return arg == expected_config_file_path

    def get_dir_permission(arg):
        if arg == os.path.dirname(expected_config_file_path):
            return SimpleNamespace(**{"st_mode": stat.S_IROTH})
        raise OSError(arg)

    monkeypatch.setattr(os.path, "exists", check_path_exists)
    monkeypatch.setattr(os, "stat", get_dir_permission)

    received_config_file_path, msgs = utils.get_conf_path(
        "blowup-lab", allowed_extensions=["json", "yaml", "yml"]
    )

    assert received_config_file_path == expected_config_file_path
    log_msg = "Skipping .blowup-lab/blowup-lab.json because it does not exist"
    assert log_msg in msgs


def test_get_conf_path_world_writable_ignored(monkeypatch) -> None:
    """a world writable directory is skipped"""

    candidate = "/etc/blowup-lab/blowup-lab.yml"

    monkeypatch.setattr(os.path, "exists", lambda arg: arg == candidate)
    monkeypatch.setattr(os, "stat", lambda arg: SimpleNamespace(**{"st_mode": stat.S_IWOTH}))

    received_config_file_path, msgs = utils.get_conf_path("blowup-lab", allowed_extensions=["yml"])
    assert received_config_file_path is None
    assert any("world-writable" in msg for msg in msgs)


@pytest.mark.parametrize(
    "set_env, file_path, anticpated_result",
    [
        (True, os.path.abspath(__file__), os.path.abspath(__file__)),
        (True, "", None),
        (False, None, None),
    ],
    ids=[
        "set and valid",
        "set and invalid",
        "not set",
    ],
)
def test_env_var_is_file_path(
    monkeypatch, set_env: bool, file_path: str, anticpated_result: Optional[str]
) -> None:
    """test env var is a file path"""
    envvar = "BLOWUP_LAB_CONFIG"
    if set_env:
        monkeypatch.setenv(envvar, file_path)
    else:
        monkeypatch.delenv(envvar, raising=False)
    result = utils.env_var_is_file_path(envvar, "config")
    assert result[0] == anticpated_result


def test_error_and_exit_early(capsys) -> None:
    """the message goes to stderr and the exit code through"""
    with pytest.raises(SystemExit) as exc:
        utils.error_and_exit_early("bad grid order", exit_code=3)
    assert exc.value.code == 3
    assert "bad grid order" in capsys.readouterr().err


def test_sentinel() -> None:
    """instantiating gives back the class"""
    assert utils.Sentinel() is utils.Sentinel
