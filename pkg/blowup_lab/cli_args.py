""" Build the args
https://www.gnu.org/software/libc/manual/html_node/Argument-Syntax.html
"""
import os

from argparse import _SubParsersAction
from argparse import ArgumentParser
from argparse import ArgumentTypeError
from argparse import HelpFormatter

from .config import ARGPARSE_TO_CONFIG
from .config import LabConfig
from .utils import Sentinel

LOG_LEVELS = ["debug", "info", "warning", "error", "critical"]

# one subcommand per suite, in run order
SUITE_HELP = {
    "spectrum-scan": "Locate the unstable eigenvalue and check the connection formula",
    "green-verify": "Check the fundamental systems, Green function and resolvent",
    "semigroup-verify": "Check the projection, Laplace inversion and time stepping",
    "kernel-bounds": "Measure the kernel pieces against their decay",
    "osc-check": "Measure the oscillatory integrals of the symbols",
    "stability-sweep": "Tune the blowup time for perturbations of decreasing size",
}


def _abs_user_path(fpath):
    """don't overload the ap type"""
    return os.path.abspath(os.path.expanduser(fpath))


def str2bool(value):
    """convert some commonly used values
    to a boolean
    """
    if isinstance(value, bool):
        return value
    if value.lower() in ("yes", "true", "t", "y", "1"):
        return True
    if value.lower() in ("no", "false", "f", "n", "0"):
        return False
    raise ArgumentTypeError("Boolean value expected.")


def seed_value(value):
    """a seed is an unsigned 64 bit integer"""
    try:
        seed = int(value, 0)
    except ValueError as exc:
        raise ArgumentTypeError(f"invalid seed '{value}'") from exc
    if not 0 <= seed < 2 ** 64:
        raise ArgumentTypeError(f"seed {seed} does not fit in 64 unsigned bits")
    return seed


class CustomHelpFormatter(HelpFormatter):
    """sort the subcommands"""

    def _iter_indented_subactions(self, action):
        try:
            get_subactions = action._get_subactions  # pylint: disable=protected-access
        except AttributeError:
            pass
        else:
            self._indent()
            if isinstance(action, _SubParsersAction):
                for subaction in sorted(get_subactions(), key=lambda x: x.dest):
                    yield subaction
            else:
                for subaction in get_subactions():
                    yield subaction
            self._dedent()


class ArgumentParserDefaultFromConfig(ArgumentParser):
    """Manually update the help text with a default value from
    LabConfig, otherwise argparse would simply show Sentinel across
    the board

    The 'dest' for an argparse param is used for the lookup in the
    config, therefore, the argparse dest, and config key need to stay
    in sync
    """

    def __init__(self, *args, **kwargs):
        self.lab_config = LabConfig({})
        super().__init__(*args, **kwargs)

    def add_argument(self, *args, **kwargs):
        """add the default to the help"""
        arg_dest = kwargs.get("dest")
        if arg_dest is not None:
            mapped_to = ARGPARSE_TO_CONFIG.get(arg_dest)
            if all((mapped_to, kwargs.get("help"))):
                _config_source, default_value = self.lab_config.get(mapped_to)
                if not isinstance(default_value, Sentinel):
                    if isinstance(default_value, list):
                        default_value = ",".join(str(value) for value in default_value)
                    kwargs["help"] += f" (default: {default_value})"
        super().add_argument(*args, **kwargs)


class CliArgs:
    """Build the args"""

    # pylint: disable=too-few-public-methods
    def __init__(self, app_name: str):

        self._app_name = app_name
        self._base_parser = ArgumentParserDefaultFromConfig(add_help=False)
        self._base()
        self.parser = ArgumentParserDefaultFromConfig(
            prog=app_name.replace("_", "-"),
            formatter_class=CustomHelpFormatter,
            parents=[self._base_parser],
        )
        self._subparsers = self.parser.add_subparsers(
            title="subcommands",
            description="valid subcommands",
            help="additional help",
            dest="app",
            metavar="{command} --help",
        )
        subparsers = {
            name: self._add_subparser(name, desc) for name, desc in SUITE_HELP.items()
        }
        self._sweep_params(subparsers["stability-sweep"])
        self._all()

    def _add_subparser(self, name: str, desc: str) -> ArgumentParser:
        return self._subparsers.add_parser(
            name,
            help=desc,
            description=f"{name}: {desc}",
            formatter_class=CustomHelpFormatter,
            parents=[self._base_parser],
        )

    def _base(self) -> None:
        self._config_params(self._base_parser)
        self._grid_params(self._base_parser)
        self._log_params(self._base_parser)
        self._output_params(self._base_parser)
        self._run_params(self._base_parser)

    @staticmethod
    def _sweep_params(parser: ArgumentParser) -> None:
        parser.add_argument(
            "--delta",
            "--deltas",
            help="Perturbation sizes, comma delimited, eg '1e-2,5e-3'",
            default=Sentinel,
            dest="deltas",
        )

    def _all(self) -> None:
        parser = self._add_subparser("all", "Run every configured suite")
        parser.add_argument(
            "--suites",
            help="Suites to run, comma delimited, an empty value runs none",
            default=Sentinel,
            dest="suites",
        )

    @staticmethod
    def _config_params(parser: ArgumentParser) -> None:
        parser.add_argument(
            "--config",
            help="Specify the configuration file, overrides BLOWUP_LAB_CONFIG",
            type=_abs_user_path,
            default=None,
            dest="config_file",
        )

    @staticmethod
    def _grid_params(parser: ArgumentParser) -> None:
        parser.add_argument(
            "--go",
            "--grid-order",
            help="Specify the number of collocation nodes on (0, 1)",
            default=Sentinel,
            dest="grid_order",
            type=int,
        )

    @staticmethod
    def _log_params(parser: ArgumentParser) -> None:
        parser.add_argument(
            "--lf",
            "--logfile",
            help="Specify the log file, truncated when the run starts",
            default=Sentinel,
            dest="logfile",
        )
        parser.add_argument(
            "--ll",
            "--loglevel",
            help="Specify the log level, debug adds grid sizes and residuals",
            default=Sentinel,
            dest="loglevel",
            choices=LOG_LEVELS,
        )

    @staticmethod
    def _output_params(parser: ArgumentParser) -> None:
        parser.add_argument(
            "-o",
            "--out",
            help="Specify the directory for the manifest, CSV files and summary",
            default=Sentinel,
            dest="out",
        )
        parser.add_argument(
            "--deterministic",
            help="Record zero wall-clock times so repeated runs are byte-identical",
            default=Sentinel,
            dest="deterministic",
            type=str2bool,
        )

    @staticmethod
    def _run_params(parser: ArgumentParser) -> None:
        parser.add_argument(
            "--seed",
            help="Specify the 64 bit seed of every random stream",
            default=Sentinel,
            dest="seed",
            type=seed_value,
        )
        parser.add_argument(
            "-j",
            "--parallelism",
            help="Specify the number of worker threads for independent samples",
            default=Sentinel,
            dest="parallelism",
            type=int,
        )
