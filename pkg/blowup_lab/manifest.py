""" the run manifest, its report rows and the files they are written to

Everything emitted here is deterministic: keys are sorted, floats carry 17
significant digits and complex numbers are written as [re, im]. Files are
written to a temporary name next to their destination and renamed into place.
"""
import csv
import io
import json
import logging
import math
import os
import tempfile

from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import List
from typing import Optional

import numpy as np

from ._version import __version__
from .errors import DomainError
from .errors import ReportWriteError
from .utils import human_time
from .utils import templar

logger = logging.getLogger(__name__)

STATUSES = ("pass", "fail", "info")

CSV_COLUMNS = ["check_id", "inputs", "measured", "target", "status"]

# extra columns of the stability sweep
SWEEP_COLUMNS = ["delta", "T_star", "strichartz_integral", "ratio"]

MANIFEST_NAME = "manifest.json"
SUMMARY_NAME = "summary.md"


def plain(value: Any) -> Any:
    """numpy scalars, arrays, tuples and complex numbers as plain JSON types"""
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def format_float(value: float) -> str:
    """17 significant digits, always parsed back as a float"""
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, ".17g")
    if not any(char in text for char in ".en"):
        text += ".0"
    return text


def render_json(value: Any, indent: Optional[int] = 4, level: int = 0) -> str:
    """json.dumps(value, indent=indent, sort_keys=True) with 17 digit floats

    ``indent=None`` gives the compact form used inside CSV cells.
    """
    value = plain(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            (json.dumps(key, ensure_ascii=False), render_json(value[key], indent, level + 1))
            for key in sorted(value)
        ]
        if indent is None:
            return "{" + ",".join(f"{key}:{item}" for key, item in items) + "}"
        inner = " " * (indent * (level + 1))
        body = ",\n".join(f"{inner}{key}: {item}" for key, item in items)
        return "{\n" + body + "\n" + " " * (indent * level) + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [render_json(item, indent, level + 1) for item in value]
        if indent is None:
            return "[" + ",".join(items) + "]"
        inner = " " * (indent * (level + 1))
        body = ",\n".join(f"{inner}{item}" for item in items)
        return "[\n" + body + "\n" + " " * (indent * level) + "]"
    raise DomainError(f"cannot serialize {type(value)} into the manifest")


@dataclass
class ReportRow:
    """one check: what went in, what was measured and how it compares"""

    check_id: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    measured: Any = None
    target: Any = None
    status: str = "info"
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise DomainError(f"status must be one of {STATUSES}, got {self.status}")

    def to_dict(self) -> Dict[str, Any]:
        """the JSON form"""
        return plain(
            {
                "check_id": self.check_id,
                "inputs": self.inputs,
                "measured": self.measured,
                "target": self.target,
                "status": self.status,
                "extra": self.extra,
            }
        )

    @classmethod
    def from_dict(cls, dct: Dict[str, Any]) -> "ReportRow":
        """the inverse of to_dict"""
        return cls(
            check_id=dct["check_id"],
            inputs=dct.get("inputs", {}),
            measured=dct.get("measured"),
            target=dct.get("target"),
            status=dct["status"],
            extra=dct.get("extra", {}),
        )


@dataclass
class RunManifest:  # pylint: disable=too-many-instance-attributes
    """everything a run measured, with the settings that produced it"""

    config: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    grid_orders: List[int] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)
    wall_clock: Dict[str, float] = field(default_factory=dict)
    suites: Dict[str, List[ReportRow]] = field(default_factory=dict)
    version: str = __version__

    def add_suite(self, name: str, rows: List[ReportRow], seconds: float = 0.0) -> None:
        """record the rows of one suite

        :raises DomainError: When the suite was already recorded or a check id repeats
        """
        if name in self.suites:
            raise DomainError(f"suite {name} is already in the manifest")
        ids = [row.check_id for row in rows]
        repeated = sorted({check_id for check_id in ids if ids.count(check_id) > 1})
        if repeated:
            raise DomainError(f"suite {name} reports {', '.join(repeated)} more than once")
        self.suites[name] = list(rows)
        self.wall_clock[name] = float(seconds)

    @property
    def rows(self) -> List[ReportRow]:
        """every row, suites in name order"""
        return [row for name in sorted(self.suites) for row in self.suites[name]]

    def counts(self) -> Dict[str, Dict[str, int]]:
        """pass/fail/info counts per suite"""
        return {
            name: {status: sum(row.status == status for row in rows) for status in STATUSES}
            for name, rows in sorted(self.suites.items())
        }

    @property
    def failed(self) -> List[ReportRow]:
        """the rows with status fail"""
        return [row for row in self.rows if row.status == "fail"]

    @property
    def exit_code(self) -> int:
        """1 when any check failed, else 0"""
        return 1 if self.failed else 0

    def to_dict(self) -> Dict[str, Any]:
        """the JSON form, with the wall clock also rendered for humans"""
        return plain(
            {
                "version": self.version,
                "config": self.config,
                "seed": self.seed,
                "grid_orders": self.grid_orders,
                "tolerances": self.tolerances,
                "wall_clock": self.wall_clock,
                "wall_clock_human": {
                    name: human_time(seconds) for name, seconds in self.wall_clock.items()
                },
                "suites": {
                    name: [row.to_dict() for row in rows] for name, rows in self.suites.items()
                },
            }
        )

    @classmethod
    def from_dict(cls, dct: Dict[str, Any]) -> "RunManifest":
        """the inverse of to_dict"""
        return cls(
            version=dct["version"],
            config=dct.get("config", {}),
            seed=dct.get("seed", 0),
            grid_orders=dct.get("grid_orders", []),
            tolerances=dct.get("tolerances", {}),
            wall_clock=dct.get("wall_clock", {}),
            suites={
                name: [ReportRow.from_dict(row) for row in rows]
                for name, rows in dct.get("suites", {}).items()
            },
        )


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return render_json(value, indent=None)


def render_csv(rows: List[ReportRow]) -> str:
    """header then one line per row, sweep columns when any row carries them"""
    columns = list(CSV_COLUMNS)
    if any(row.extra for row in rows):
        columns += SWEEP_COLUMNS
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer)
    writer.writerow(columns)
    for row in rows:
        line = [
            row.check_id,
            render_json(row.inputs, indent=None),
            _cell(row.measured),
            _cell(row.target),
            row.status,
        ]
        if len(columns) > len(CSV_COLUMNS):
            line += [_cell(row.extra.get(column)) for column in SWEEP_COLUMNS]
        writer.writerow(line)
    return buffer.getvalue()


def render_summary(manifest: RunManifest, template: str) -> str:
    """the markdown summary from a jinja2 template"""
    template_vars = {
        "version": manifest.version,
        "seed": manifest.seed,
        "grid_orders": manifest.grid_orders,
        "counts": manifest.counts(),
        "failed": [row.to_dict() for row in manifest.failed],
        "wall_clock": {name: human_time(value) for name, value in manifest.wall_clock.items()},
    }
    return templar(template, template_vars)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    handle, tmp_path = tempfile.mkstemp(
        prefix=f".{os.path.basename(path)}.", suffix=".tmp", dir=directory
    )
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as tmp:
            tmp.write(text)
            tmp.flush()
            os.fsync(tmp.fileno())
        os.replace(tmp_path, path)
    except OSError as exc:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise ReportWriteError(f"could not write report ({exc})", path) from exc


def emit_report(
    manifest: RunManifest, out_dir: str, summary_template: Optional[str] = None
) -> Dict[str, str]:
    """write manifest.json, one CSV per suite and, given a template, summary.md

    All texts are rendered before the first file is written.

    :param manifest: The finished run
    :type manifest: RunManifest
    :param out_dir: The output directory, created when missing
    :type out_dir: str
    :param summary_template: Path to the jinja2 summary template
    :type summary_template: str
    :raises ReportWriteError: When a file cannot be written, with its path
    :return: Written paths keyed by file name
    :rtype: dict
    """
    texts = {MANIFEST_NAME: render_json(manifest.to_dict()) + "\n"}
    for name, rows in manifest.suites.items():
        texts[f"{name}.csv"] = render_csv(rows)
    if summary_template is not None:
        try:
            with open(summary_template, "r", encoding="utf-8") as template_fh:
                texts[SUMMARY_NAME] = render_summary(manifest, template_fh.read())
        except OSError as exc:
            raise ReportWriteError(
                f"could not read the summary template ({exc})", summary_template
            ) from exc

    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ReportWriteError(f"could not create the output directory ({exc})", out_dir) from exc
    written = {}
    for name in sorted(texts):
        path = os.path.join(out_dir, name)
        _atomic_write(path, texts[name])
        written[name] = path
        logger.debug("wrote %s", path)
    return written


def load_manifest(path: str) -> RunManifest:
    """read a manifest.json back

    :raises DomainError: When the file is not a manifest
    """
    with open(path, "r", encoding="utf-8") as manifest_fh:
        try:
            dct = json.load(manifest_fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(dct, dict) or "version" not in dct or "suites" not in dct:
        raise DomainError(f"{path} does not hold a run manifest")
    return RunManifest.from_dict(dct)
