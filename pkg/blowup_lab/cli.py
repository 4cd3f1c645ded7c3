""" start here
"""
import json
import logging
import os
import sys
import sysconfig
import time

from argparse import ArgumentTypeError
from argparse import Namespace
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

from yaml import YAMLError

from . import suites
from .cli_args import LOG_LEVELS
from .cli_args import CliArgs
from .cli_args import seed_value
from .cli_args import str2bool
from .config import ARGPARSE_TO_CONFIG
from .config import ROOT
from .config import SUITE_NAMES
from .config import LabConfig
from .errors import ConfigError
from .errors import ReportWriteError
from .manifest import RunManifest
from .manifest import emit_report
from .suites import SuiteContext
from .utils import Sentinel
from .utils import env_var_is_file_path
from .utils import error_and_exit_early
from .utils import get_conf_path
from .utils import human_time
from .utils import to_list
from .yaml import SafeLoader
from .yaml import yaml

APP_NAME = "blowup_lab"
CONFIG_ENV_VAR = "BLOWUP_LAB_CONFIG"
SUMMARY_TEMPLATE = os.path.join("templates", "summary.md.j2")

# the smallest grid the collocation and the suites accept
MIN_GRID_ORDER = 8

logger = logging.getLogger(APP_NAME)


def _get_share_dir() -> Optional[str]:
    """
    returns datadir (e.g. /usr/share/blowup_lab) to use for the
    report templates. First found wins.
    """

    # Development path
    path = os.path.join(os.path.dirname(__file__), "..", "share", APP_NAME)
    if os.path.exists(path):
        return path

    # ~/.local/share/APP_NAME
    userbase = sysconfig.get_config_var("userbase")
    if userbase is not None:
        path = os.path.join(userbase, "share", APP_NAME)
        if os.path.exists(path):
            return path

    # /usr/share/APP_NAME  (or the venv equivalent)
    path = os.path.join(sys.prefix, "share", APP_NAME)
    if os.path.exists(path):
        return path

    # /usr/share/APP_NAME  (or what was specified as the datarootdir when python was built)
    datarootdir = sysconfig.get_config_var("datarootdir")
    if datarootdir is not None:
        path = os.path.join(datarootdir, APP_NAME)
        if os.path.exists(path):
            return path

    # No path found above
    return None


def update_args(args: Namespace) -> List[str]:
    """
    Updates args with the corresponding config values (or their defaults) unless
    explicitly specified by the user.

    Every option settable in the config file has an argparse default of
    Sentinel, so a value given on the command line is never overwritten, even
    when it matches the default.
    """

    msgs = []

    if not hasattr(args, "config") or not args.config:
        msgs.append("No config file parsed, no default parameters to override.")
        return msgs

    for attr, path in ARGPARSE_TO_CONFIG.items():
        if not hasattr(args, attr):
            # only present in a subcommand that is not running
            continue

        if getattr(args, attr) is not Sentinel:
            continue

        source, value = args.config.get(path)
        msgs.append(f"Setting arg '{attr}' to '{value}' via {source.value}")
        setattr(args, attr, value)

    return msgs


def setup_logger(args: Namespace) -> None:
    """set up the logger

    :param args: The cli args
    :type args: argparse namespace
    """
    if os.path.exists(args.logfile):
        with open(args.logfile, "w"):
            pass
    hdlr = logging.FileHandler(args.logfile)
    formatter = logging.Formatter(
        fmt="%(asctime)s.%(msecs)03d %(levelname)s '%(name)s.%(funcName)s' %(message)s",
        datefmt="%y%m%d%H%M%S",
    )
    formatter.converter = time.gmtime
    hdlr.setFormatter(formatter)
    logger.addHandler(hdlr)
    logger.setLevel(getattr(logging, args.loglevel.upper()))


def _load_config_file(config_path: str) -> Dict:
    with open(config_path, "r") as config_fh:
        if config_path.endswith(".json"):
            try:
                return json.load(config_fh)
            except (TypeError, json.decoder.JSONDecodeError) as exc:
                error_and_exit_early(f"Invalid JSON config found in file '{config_path}' ({exc})")
        try:
            return yaml.load(config_fh, Loader=SafeLoader)
        except YAMLError as exc:
            error_and_exit_early(f"Config file at {config_path} but failed to parse it ({exc})")


# Some branches here call error_and_exit_early() which doesn't return, it exits.
# pylint: disable=inconsistent-return-statements
def setup_config(config_file: Optional[str] = None) -> Tuple[List[str], LabConfig]:
    """
    Load up a configuration file, logging each step.
    Return (log messages, LabConfig).
    A file given with --config wins over BLOWUP_LAB_CONFIG, which wins over
    the search path. Without any, default settings are used.
    If it's found but empty or not well formed, bail out.
    """
    pre_logger_msgs = []
    config_path = None
    env_config_path, msgs = env_var_is_file_path(CONFIG_ENV_VAR, "config")
    pre_logger_msgs += msgs

    found_config_path, msgs = get_conf_path(
        "blowup-lab", allowed_extensions=["yml", "yaml", "json"]
    )
    pre_logger_msgs += msgs

    if config_file is not None:
        if not os.path.isfile(config_file):
            error_and_exit_early(f"The config file '{config_file}' could not be found")
        config_path = config_file
        pre_logger_msgs.append(f"Using config file at {config_path} set by --config")
    elif env_config_path is not None:
        config_path = env_config_path
        pre_logger_msgs.append(f"Using config file at {config_path} set by {CONFIG_ENV_VAR}")
    elif found_config_path is not None:
        config_path = found_config_path
        pre_logger_msgs.append(f"Using config file at {config_path} in search path")
    else:
        pre_logger_msgs.append(
            "No valid config file found, using all default values for configuration."
        )

    if not config_path:
        return pre_logger_msgs, LabConfig({})

    config = _load_config_file(config_path)
    if isinstance(config, dict) and isinstance(config.get(ROOT), dict):
        pre_logger_msgs.append("Successfully parsed config file")
        return pre_logger_msgs, LabConfig(config)

    error_and_exit_early(f"Config file was empty, null, or did not contain a '{ROOT}' key")


def _requested_suites(args: Namespace) -> List[str]:
    if args.app != "all":
        return [args.app]
    requested = to_list(args.suites)
    unknown = [name for name in requested if name not in SUITE_NAMES]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}, expected some of {SUITE_NAMES}")
    return requested


def suite_context(args: Namespace, name: str) -> SuiteContext:
    """the settings one suite runs with

    :raises ConfigError: When a config section is malformed
    """
    overrides = {}
    if name == "stability-sweep" and getattr(args, "deltas", None) is not None:
        overrides["deltas"] = args.deltas
    return SuiteContext(
        name=name,
        grid_order=args.grid_order,
        seed=args.seed,
        parallelism=args.parallelism,
        section=args.config.section(name),
        numerics=args.config.section("numerics"),
        overrides=overrides,
    )


def _validate(args: Namespace) -> None:
    # values from a config file skip the argparse types
    try:
        args.grid_order = int(args.grid_order)
        args.parallelism = int(args.parallelism)
        args.seed = seed_value(str(args.seed))
        args.deterministic = str2bool(str(args.deterministic))
    except (TypeError, ValueError, ArgumentTypeError) as exc:
        raise ConfigError(f"invalid run setting: {exc}") from exc
    if args.grid_order < MIN_GRID_ORDER:
        raise ConfigError(f"grid order must be at least {MIN_GRID_ORDER}, got {args.grid_order}")
    if args.parallelism < 1:
        raise ConfigError(f"parallelism must be at least 1, got {args.parallelism}")
    if args.loglevel not in LOG_LEVELS:
        raise ConfigError(f"log level must be one of {LOG_LEVELS}, got {args.loglevel}")
    if hasattr(args, "deltas"):
        try:
            args.deltas = [float(delta) for delta in to_list(args.deltas)]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid deltas {args.deltas}") from exc
        if not args.deltas or any(not delta > 0 for delta in args.deltas):
            raise ConfigError(f"deltas must be positive, got {args.deltas}")
    args.suites = _requested_suites(args)
    for name in args.suites:
        suites.get(name).validate(suite_context(args, name))


def parse_and_update(
    params: List, error_cb: Optional[Callable] = None
) -> Tuple[List[str], Namespace]:
    """parse some params and update"""
    parser = CliArgs(APP_NAME).parser

    if error_cb:
        parser.error = error_cb  # type: ignore
    args = parser.parse_args(params)

    if not args.app:
        args.app = "all"
        args.suites = Sentinel

    pre_logger_msgs: List[str] = []
    config_msgs, config = setup_config(args.config_file)
    pre_logger_msgs += config_msgs
    args.config = config
    pre_logger_msgs += update_args(args)

    try:
        _validate(args)
    except ConfigError as exc:
        error_and_exit_early(str(exc))

    args.logfile = os.path.abspath(os.path.expanduser(args.logfile))
    args.out = os.path.abspath(os.path.expanduser(args.out))

    share_dir = _get_share_dir()
    if share_dir is not None:
        args.share_dir = share_dir
    else:
        error_and_exit_early("problem finding share dir")

    args.original_command = params

    for key, value in sorted(vars(args).items()):
        pre_logger_msgs.append(f"Running with {key} as {value} {type(value)}")

    return pre_logger_msgs, args


def _snapshot(args: Namespace) -> Dict:
    """the effective configuration, command line included"""
    snapshot = args.config.snapshot()
    snapshot["deterministic"] = args.deterministic
    snapshot["grid-order"] = args.grid_order
    snapshot["log"] = {"file": args.logfile, "level": args.loglevel}
    snapshot["out"] = args.out
    snapshot["parallelism"] = args.parallelism
    snapshot["seed"] = args.seed
    snapshot["suites"] = list(args.suites)
    if getattr(args, "deltas", None) is not None:
        snapshot["stability-sweep"]["deltas"] = list(args.deltas)
    return snapshot


def _tolerances(snapshot: Dict, names: List[str]) -> Dict[str, float]:
    tolerances = {
        f"numerics.{key}": value
        for key, value in snapshot["numerics"].items()
        if key.endswith("-tol")
    }
    for name in names:
        for key, value in snapshot[name].items():
            if key.endswith("-tol"):
                tolerances[f"{name}.{key}"] = value
    return tolerances


def run(args: Namespace) -> int:
    """run the requested suites and write the report

    :return: The exit code, 1 when a check failed or the report could not be written
    :rtype: int
    """
    snapshot = _snapshot(args)
    manifest = RunManifest(
        config=snapshot,
        seed=args.seed,
        tolerances=_tolerances(snapshot, args.suites),
    )
    grid_orders = set()
    for name in args.suites:
        context = suite_context(args, name)
        suite = suites.get(name)(context)
        logger.info("running suite %s", name)
        start = time.perf_counter()
        rows = suite.run()
        seconds = 0.0 if args.deterministic else time.perf_counter() - start
        grid_orders |= suite.grid_orders
        manifest.add_suite(name, rows, seconds)
        counts = manifest.counts()[name]
        logger.info("suite %s finished in %s: %s", name, human_time(seconds), counts)
        print(f"{name}: {counts['pass']} pass, {counts['fail']} fail, {counts['info']} info")
    manifest.grid_orders = sorted(grid_orders)

    try:
        written = emit_report(manifest, args.out, os.path.join(args.share_dir, SUMMARY_TEMPLATE))
    except ReportWriteError as exc:
        logger.error(str(exc))
        print(f"\x1b[31m[ERROR]: {exc}\x1b[0m", file=sys.stderr)
        return 1
    for row in manifest.failed:
        logger.warning("failed: %s measured %s, target %s", row.check_id, row.measured, row.target)
    logger.info("report written to %s", ", ".join(sorted(written.values())))
    return manifest.exit_code


def main():
    """start here"""
    pre_logger_msgs, args = parse_and_update(sys.argv[1:])

    setup_logger(args)
    for msg in pre_logger_msgs:
        logger.debug(msg)

    sys.exit(run(args))


if __name__ == "__main__":
    main()
