""" some utilities that didn't fit elsewhere
"""
import logging
import os
import stat
import sys
import sysconfig

from typing import Any
from typing import List
from typing import Mapping
from typing import NoReturn
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np

from jinja2 import Environment
from jinja2 import StrictUndefined
from jinja2 import TemplateError

logger = logging.getLogger(__name__)


class Sentinel:  # pylint: disable=too-few-public-methods
    """
    Used as a sentinel value when None won't suffice.
    Usually the class itself is what we use as the value, not an instance of it.
    foo = Sentinel
    if foo is Sentinel: ...
    """

    def __new__(cls):
        return cls


def human_time(seconds: float) -> str:
    """convert seconds into human readable
    00d00h00m00s format"""
    sign_string = "-" if seconds < 0 else ""
    seconds = abs(int(seconds))
    days, seconds = divmod(seconds, 86400)
    hours, seconds = divmod(seconds, 3600)
    minutes, seconds = divmod(seconds, 60)
    if days > 0:
        return "%s%dd%dh%dm%ds" % (sign_string, days, hours, minutes, seconds)
    if hours > 0:
        return "%s%dh%dm%ds" % (sign_string, hours, minutes, seconds)
    if minutes > 0:
        return "%s%dm%ds" % (sign_string, minutes, seconds)
    return "%s%ds" % (sign_string, seconds)


def to_list(thing: Union[str, List, None]) -> List:
    """convert something to a list if necessary

    comma separated strings are split, None becomes an empty list
    """
    if thing is None:
        return []
    if isinstance(thing, str):
        return [part.strip() for part in thing.split(",") if part.strip()]
    if not isinstance(thing, list):
        return [thing]
    return thing


def templar(string: str, template_vars: Mapping) -> str:
    """render a jinja2 template string

    :param string: The template string
    :type string: str
    :param template_vars: The vars used to render the template
    :type template_vars: dict
    :return: The rendered text, or the error text if rendering failed
    :rtype: str
    """
    env = Environment(autoescape=False, keep_trailing_newline=True, undefined=StrictUndefined)
    try:
        template = env.from_string(string)
        result = template.render(template_vars)
    except TemplateError as exc:
        result = str(exc)
        logger.error("summary template failed to render: %s", str(exc))
    return result


def seeded_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """a counter based generator for one independent stream

    :param seed: The 64 bit run seed
    :type seed: int
    :param stream: The stream index, each suite uses its own
    :type stream: int
    :return: The generator
    :rtype: numpy.random.Generator
    """
    bit_generator = np.random.Philox(key=seed % 2 ** 64)
    if stream:
        bit_generator = bit_generator.jumped(stream)
    return np.random.Generator(bit_generator)


def env_var_is_file_path(env_var: str, kind: str) -> Tuple[Optional[str], List[str]]:
    """check if a given env var is a viable file path, if so return that path"""
    file_path = None
    msgs = []
    candidate_path = os.environ.get(env_var)
    if candidate_path is None:
        msgs.append(f"No {kind} file set by {env_var}")
    else:
        msgs.append(f"Found a {kind} file at {candidate_path} set by {env_var}")
        if os.path.isfile(candidate_path) and os.path.exists(candidate_path):
            file_path = candidate_path
            msgs.append(f"{kind.capitalize()} file at {file_path} set by {env_var} is viable")
            exp_path = os.path.abspath(os.path.expanduser(file_path))
            if exp_path != file_path:
                msgs.append(f"{kind.capitalize()} resolves to {exp_path}")
                file_path = exp_path
        else:
            msgs.append(f"{env_var} set as {candidate_path} but not valid")
    return file_path, msgs


def _get_config_file(
    path: str, filename: str, allowed_extensions: List, msgs: List
) -> Optional[str]:
    """check if filename is present in given path with allowed
    extensions. If multiple files are present it throws an error
    as only a single valid config file can be present in the
    given path.
    """
    config_files_found = []
    config_file = None
    valid_file_names = [
        f"{filename}.{allowed_extension}" for allowed_extension in allowed_extensions
    ]
    for name in valid_file_names:
        candidate_config_path = os.path.join(path, name)
        if not os.path.exists(candidate_config_path):
            msgs.append(f"Skipping {path}/{name} because it does not exist")
            continue
        config_files_found.append(candidate_config_path)

    if len(config_files_found) > 1:
        error_msg = (
            f"only one file among '{', '.join(valid_file_names)}' should be present under"
            f" directory '{path}' instead multiple config files found"
            f" '{', '.join(config_files_found)}'"
        )
        error_and_exit_early(error_msg)

    if len(config_files_found) == 1:
        config_file = config_files_found[0]

    return config_file


def get_conf_path(
    filename: str, allowed_extensions: List[str]
) -> Tuple[Optional[str], List[str]]:
    """
    returns the path of the first config file found in the search path,
    along with the messages describing the search
    """

    potential_paths: List[str] = []
    msgs: List[str] = []

    # .blowup-lab of current directory
    potential_paths.append(".blowup-lab")

    # Development path
    path = os.path.join(os.path.dirname(__file__), "..", "etc", "blowup-lab")
    potential_paths.append(path)

    # ~/.config/blowup-lab
    path = os.path.join(os.path.expanduser("~"), ".config", "blowup-lab")
    potential_paths.append(path)

    # /etc/blowup-lab
    path = os.path.join("/", "etc", "blowup-lab")
    potential_paths.append(path)

    # /usr/local/etc/blowup-lab
    prefix = sysconfig.get_config_var("prefix")
    if prefix:
        path = os.path.join(prefix, "local", "etc", "blowup-lab")
        potential_paths.append(path)

    for path in potential_paths:
        config_path = _get_config_file(path, filename, allowed_extensions, msgs)
        if config_path is None:
            continue
        try:
            perms = os.stat(path)
            if perms.st_mode & stat.S_IWOTH:
                msgs.append(
                    f"Ignoring potential configuration directory {path} because it "
                    "is world-writable."
                )
                continue
            return (config_path, msgs)
        except OSError:
            continue

    return (None, msgs)


def error_and_exit_early(msg: Any, exit_code: int = 2) -> NoReturn:
    """get out of here fast, configuration problems exit with 2"""
    print(f"\x1b[31m[ERROR]: {msg}\x1b[0m", file=sys.stderr)
    sys.exit(exit_code)
