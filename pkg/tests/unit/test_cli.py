""" tests for cli
"""
import json
import os

import pytest

import blowup_lab.cli as cli

from blowup_lab.manifest import ReportRow
from blowup_lab.utils import Sentinel

from ..defaults import FIXTURES_DIR

CLI_FIXTURES = os.path.join(FIXTURES_DIR, "unit", "cli")


@pytest.mark.parametrize(
    "given, argname, expected",
    [
        (["osc-check", "--go", "48"], "grid_order", 48),
        (["osc-check"], "grid_order", 32),
        (["osc-check", "--go", "64"], "grid_order", 64),
        (["osc-check"], "parallelism", 2),
        (["osc-check"], "deterministic", False),
        (["osc-check"], "loglevel", "critical"),
        (["osc-check", "--ll", "debug"], "loglevel", "debug"),
        (["osc-check"], "seed", 7),
        (["osc-check", "--seed", "0xff"], "seed", 255),
        (["osc-check", "--deterministic", "yes"], "deterministic", True),
        (["osc-check"], "out", os.path.abspath("./blowup-lab-output")),
        (["osc-check", "-o", "/tmp/lab"], "out", "/tmp/lab"),
        (["stability-sweep"], "deltas", [2e-2, 1e-2]),
        (["stability-sweep", "--deltas", "3e-2,1e-3"], "deltas", [3e-2, 1e-3]),
        (["stability-sweep", "--delta", "5e-3"], "deltas", [5e-3]),
        (["osc-check"], "suites", ["osc-check"]),
        ([], "suites", ["osc-check"]),
        ([], "app", "all"),
        (["all", "--suites", "spectrum-scan, osc-check"], "suites", ["spectrum-scan", "osc-check"]),
        (["all", "--suites", ""], "suites", []),
    ],
    ids=[
        "commandline overrides config file value",
        "config file overrides internal default value",
        "explicitly specifying the default still uses the given value",
        "config file parallelism",
        "internal default value gets picked if not overridden",
        "nested config option from the file",
        "nested config option override by commandline",
        "seed from the config file",
        "hexadecimal seed on the commandline",
        "deterministic flag",
        "default output directory made absolute",
        "output directory on the commandline",
        "deltas from the suite section",
        "comma delimited deltas",
        "single delta alias",
        "a subcommand runs only itself",
        "no subcommand runs the configured suites",
        "no subcommand means all",
        "suites on the commandline",
        "empty suites run nothing",
    ],
)
def test_update_args_general(monkeypatch, given, argname, expected):
    """the command line, then the config file, then the internal defaults"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, "blowup-lab.yml"))
    _pre_logger_msgs, args = cli.parse_and_update(given)
    result = vars(args)[argname]
    assert result == expected


def test_config_flag_wins_over_env_var(monkeypatch):
    """--config is read instead of the file named by the environment"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, "blowup-lab.yml"))
    given = ["osc-check", "--config", os.path.join(CLI_FIXTURES, "blowup-lab.json")]
    msgs, args = cli.parse_and_update(given)
    assert args.grid_order == 16
    assert args.seed == 16
    assert any("set by --config" in msg for msg in msgs)


def test_no_config_uses_defaults(monkeypatch, tmp_path):
    """without any file every setting has its internal default"""
    monkeypatch.delenv("BLOWUP_LAB_CONFIG", raising=False)
    monkeypatch.setattr(cli, "get_conf_path", lambda *_args, **_kwargs: (None, []))
    monkeypatch.chdir(tmp_path)
    _msgs, args = cli.parse_and_update(["spectrum-scan"])
    assert args.grid_order == 64
    assert args.seed == 0
    assert args.parallelism == 1
    assert args.loglevel == "info"
    assert args.logfile == os.path.join(os.getcwd(), "blowup-lab.log")


@pytest.mark.parametrize(
    "given",
    [
        ["osc-check", "--go", "4"],
        ["osc-check", "-j", "0"],
        ["osc-check", "--seed", "-1"],
        ["osc-check", "--seed", "seven"],
        ["osc-check", "--deterministic", "maybe"],
        ["stability-sweep", "--deltas", "1e-2,-1e-3"],
        ["stability-sweep", "--deltas", "small"],
        ["all", "--suites", "osc-check,no-such-suite"],
        ["osc-check", "--config", "/no/such/blowup-lab.yml"],
        ["no-such-command"],
    ],
    ids=[
        "grid order below the minimum",
        "no worker threads",
        "negative seed",
        "seed not a number",
        "deterministic not a boolean",
        "negative delta",
        "delta not a number",
        "unknown suite",
        "missing config file",
        "unknown subcommand",
    ],
)
def test_invalid_settings_exit_with_2(monkeypatch, given):
    """configuration problems exit with 2 before anything runs"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, "blowup-lab.yml"))
    with pytest.raises(SystemExit) as exc:
        cli.parse_and_update(given)
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "fixture",
    ["blowup-lab_empty.yml", "blowup-lab_bad_section.yml", "blowup-lab_bad_loglevel.yml"],
    ids=["no root key", "unknown symbol family", "unknown log level"],
)
def test_invalid_config_file_exits_with_2(monkeypatch, fixture):
    """a config file the run cannot use"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, fixture))
    with pytest.raises(SystemExit) as exc:
        cli.parse_and_update(["osc-check"])
    assert exc.value.code == 2


class _FakeSuite:
    """stands in for a registered suite"""

    status = "pass"

    def __init__(self, context):
        self._context = context
        self.grid_orders = {context.grid_order}

    @classmethod
    def validate(cls, context):  # pylint: disable=unused-argument
        return None

    def run(self):
        return [
            ReportRow(
                check_id="X.one",
                inputs={"seed": self._context.seed},
                measured=0.5,
                target=1.0,
                status=self.status,
            )
        ]


@pytest.mark.parametrize("status, exit_code", [("pass", 0), ("info", 0), ("fail", 1)])
def test_run_writes_the_report(monkeypatch, tmp_path, status, exit_code):
    """run returns 1 exactly when a check failed"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, "blowup-lab.yml"))
    monkeypatch.setattr(_FakeSuite, "status", status)
    monkeypatch.setattr(cli.suites, "get", lambda _name: _FakeSuite)
    out = tmp_path / "out"
    _msgs, args = cli.parse_and_update(
        ["all", "--suites", "spectrum-scan,osc-check", "-o", str(out), "--deterministic", "true"]
    )
    assert cli.run(args) == exit_code

    assert sorted(os.listdir(out)) == [
        "manifest.json",
        "osc-check.csv",
        "spectrum-scan.csv",
        "summary.md",
    ]
    with open(out / "manifest.json", encoding="utf-8") as manifest_fh:
        manifest = json.load(manifest_fh)
    assert manifest["seed"] == 7
    assert manifest["grid_orders"] == [32]
    assert manifest["wall_clock"] == {"osc-check": 0.0, "spectrum-scan": 0.0}
    assert manifest["config"]["suites"] == ["spectrum-scan", "osc-check"]
    assert manifest["config"]["osc-check"]["families"] == ["gaussian"]
    assert "osc-check.a-points" not in manifest["tolerances"]
    assert "osc-check.exponent-tol" in manifest["tolerances"]
    assert "numerics.volterra-tol" in manifest["tolerances"]


def test_run_is_byte_identical_when_deterministic(monkeypatch, tmp_path):
    """same seed, same config, same bytes"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, "blowup-lab.yml"))
    monkeypatch.setattr(cli.suites, "get", lambda _name: _FakeSuite)
    contents = []
    out = tmp_path / "out"
    for _attempt in range(2):
        _msgs, args = cli.parse_and_update(
            ["osc-check", "-o", str(out), "--deterministic", "true"]
        )
        cli.run(args)
        contents.append({name: (out / name).read_bytes() for name in sorted(os.listdir(out))})
    assert contents[0] == contents[1]


def test_run_report_failure_exits_with_1(monkeypatch, tmp_path):
    """an output directory that cannot be created"""
    monkeypatch.setenv("BLOWUP_LAB_CONFIG", os.path.join(CLI_FIXTURES, "blowup-lab.yml"))
    monkeypatch.setattr(cli.suites, "get", lambda _name: _FakeSuite)
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    _msgs, args = cli.parse_and_update(["osc-check", "-o", str(blocker / "out")])
    assert cli.run(args) == 1


def test_update_args_without_config():
    """nothing to merge"""

    class _Args:  # pylint: disable=too-few-public-methods
        config = None
        grid_order = Sentinel

    msgs = cli.update_args(_Args())  # type: ignore
    assert msgs == ["No config file parsed, no default parameters to override."]
