"""
Configuration subsystem for blowup-lab
"""
from copy import deepcopy
from enum import Enum
from typing import Any
from typing import Dict
from typing import List
from typing import Tuple

from .errors import ConfigError
from .utils import Sentinel

# The structure here mimics what the yaml file parses to. Every config option
# has a default here.
#
# NOTE!!! If you change any default here, update docs/sample-config.yml

SUITE_NAMES = [
    "spectrum-scan",
    "green-verify",
    "semigroup-verify",
    "kernel-bounds",
    "osc-check",
    "stability-sweep",
]

_DEFAULTS = {
    "blowup-lab": {
        "deterministic": False,
        "grid-order": 64,
        "log": {
            "file": "./blowup-lab.log",
            "level": "info",
        },
        "numerics": {
            "delta0": 0.5,
            "delta1": 0.25,
            "spectrum-guard": 1e-3,
            "volterra-max-iter": 50,
            "volterra-tol": 1e-12,
            "wronskian-tol": 1e-6,
        },
        "out": "./blowup-lab-output",
        "parallelism": 1,
        "seed": 0,
        "suites": list(SUITE_NAMES),
        "spectrum-scan": {
            "re-min": 0.05,
            "re-max": 2.0,
            "im-min": -10.0,
            "im-max": 10.0,
            "resolution": 64,
            "zero-tol": 1e-6,
            "connection-samples": 20,
            "connection-tol": 1e-8,
            "phi0-points": 5,
            "phi0-tol": 1e-9,
        },
        "green-verify": {
            "wronskian-samples": 30,
            "omega-max": 50.0,
            "w0-floor": 0.5,
            "w0-exponent-min": -1.3,
            "w0-exponent-max": -0.7,
            "resolvent-data": 5,
            "resolvent-lambdas": [[0.1, 0.5], [0.2, -3.0], [0.05, 8.0]],
            "resolvent-tol": 1e-6,
            "reassembly-tol": 1e-8,
            "jump-points": [0.3, 0.5, 0.7],
            "jump-tol": 1e-4,
        },
        "semigroup-verify": {
            "eigen-tol": 1e-6,
            "refined-order": 128,
            "refinement-gain": 100.0,
            "contour-eps": 0.05,
            "omega-max": 200.0,
            "taus": [0.5, 1.0, 2.0],
            "consistency-tol": 1e-3,
            "free-blowup-time": 2.0,
            "free-taus": [0.25, 0.5],
            "energy-samples": 20,
            "energy-tau-max": 10.0,
            "energy-slope": 0.01,
            "energy-growth": 5.0,
            "corpus-size": 16,
            "envelope-drift": 0.05,
            "identity-tol": 1e-8,
        },
        "kernel-bounds": {
            "pieces": [1, 2, 3, 4, 5, 6],
            "taus": [1.0, 2.0, 4.0, 8.0],
            "s-values": [0.3, 0.6, 0.9],
            "omega-max": 32.0,
            "n-omega": 129,
            "rho-nodes": 24,
            "refine-tol": 0.01,
            "eps-check": 1e-3,
            "decay-exponent": -1.0,
            "decay-s": 0.5,
        },
        "osc-check": {
            "families": [
                "odd_rational",
                "odd_slow",
                "even_power",
                "cutoff_rho1",
                "cutoff_rho2",
                "gaussian",
            ],
            "a-min": 1e-2,
            "a-max": 1e2,
            "a-points": 9,
            "ratio-limit": 1e3,
            "alphas": [0.3, 0.9],
            "small-a": [1e-4, 2e-4, 4e-4, 8e-4, 1.6e-3, 3.2e-3],
            "exponent-tol": 0.03,
        },
        "stability-sweep": {
            "deltas": [1e-2, 5e-3],
            "detune": 0.02,
            "detune-gain": 10.0,
            "ratio-min": 2.5,
            "ratio-max": 6.0,
            "t-star-min": 0.9,
            "t-star-max": 1.1,
            "shape": "random",
            "window": 0.1,
            "tau-max": 10.0,
            "dt": None,
            "grid-order": 24,
            "sample-dt": 0.05,
            "blow-past": 10.0,
            "method": "brent",
            "t-tol": 1e-8,
            "coefficient-tol": 1e-6,
            "modes": 6,
        },
    },
}

# This maps argparse destination variables to config paths
ROOT = "blowup-lab"
ARGPARSE_TO_CONFIG = {
    "deltas": [ROOT, "stability-sweep", "deltas"],
    "deterministic": [ROOT, "deterministic"],
    "grid_order": [ROOT, "grid-order"],
    "logfile": [ROOT, "log", "file"],
    "loglevel": [ROOT, "log", "level"],
    "out": [ROOT, "out"],
    "parallelism": [ROOT, "parallelism"],
    "seed": [ROOT, "seed"],
    "suites": [ROOT, "suites"],
}


class LabConfigSource(Enum):
    """mapping some enums to log friendly text"""

    USER_CFG = "user provided configuration file"
    ARGPARSE_DEFAULT = "default commandline value"
    DEFAULT_CFG = "default configuration value"


class LabConfig:
    """
    A simple wrapper around a dict, with a method that handles defaults nicely.
    """

    def __init__(self, dct: Dict):
        self.config = dct

    def get(self, keys: List[str], default: Any = Sentinel) -> Tuple[LabConfigSource, Any]:
        """
        Takes a list of keys that correspond to nested keys in config.
        If the key is found in the config, return the value.
        Otherwise, if a non-Sentinel default is given, return that.
        Lastly look to the internal default config [defined above] and pull
        out the value from there.

        If after all that the key didn't match, throw KeyError.
        """
        current = self.config
        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                break
        else:
            return LabConfigSource.USER_CFG, current

        if default is not Sentinel:
            return LabConfigSource.ARGPARSE_DEFAULT, default

        current = _DEFAULTS
        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                break
        else:
            return LabConfigSource.DEFAULT_CFG, current

        raise KeyError(keys)

    def section(self, name: str) -> Dict[str, Any]:
        """a flat section with user values laid over the defaults

        :param name: The section under the root key, e.g. 'numerics' or a suite name
        :raises ConfigError: When the user section is not a mapping, has nested
            values or names a key the section does not know
        :return: The merged section
        :rtype: dict
        """
        merged = deepcopy(_DEFAULTS[ROOT][name])
        _source, user = self.get([ROOT, name], default={})
        if user is None:
            return merged
        if not isinstance(user, dict):
            raise ConfigError(f"config section '{name}' must be a mapping, got {type(user)}")
        for key, value in user.items():
            if key not in merged:
                raise ConfigError(f"unknown key '{key}' in config section '{name}'")
            if isinstance(value, dict):
                raise ConfigError(f"config section '{name}' is flat, '{key}' holds a mapping")
            merged[key] = value
        return merged

    def snapshot(self) -> Dict[str, Any]:
        """every root level setting and section as the run sees it"""
        snapshot = {}
        for key, value in _DEFAULTS[ROOT].items():
            if isinstance(value, dict) and key != "log":
                snapshot[key] = self.section(key)
            else:
                snapshot[key] = deepcopy(self.get([ROOT, key])[1])
        return snapshot
