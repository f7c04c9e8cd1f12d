"""Writing run reports: a single JSON file or a CSV bundle with a manifest."""

import json
import logging
import os
from collections import OrderedDict

import numpy as np
from cli_helpers.tabular_output import TabularOutputFormatter

from .packages.rgflow import FlowReport
from .packages.spectral import SPECTRA_HEADERS

_logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
MANIFEST_FILE = "manifest.json"


def plain(value):
    """Recursively convert numpy and complex values into JSON-ready Python values."""
    if isinstance(value, dict):
        return OrderedDict((str(k), plain(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def to_json(report):
    return json.dumps(plain(report.to_serializable()), sort_keys=True, indent=2) + "\n"


def format_csv(headers, rows):
    formatter = TabularOutputFormatter(format_name="csv")
    rows = [[plain(v) for v in row] for row in rows]
    lines = formatter.format_output(rows, list(headers))
    if isinstance(lines, str):
        return lines if lines.endswith("\n") else lines + "\n"
    return "\n".join(lines) + "\n"


def csv_tables(report):
    """(file name, headers, rows) for every table the report has data for."""
    tables = []
    if report.modes is not None:
        tables.append(("spectra.csv", SPECTRA_HEADERS, list(report.modes.rows())))
    if isinstance(report.flow, FlowReport):
        tables.append(("flow.csv", report.flow.headers(), list(report.flow.table())))
    if report.partition is not None:
        tables.append(
            ("partition.csv", report.partition.headers(), list(report.partition.table()))
        )
    return tables


def _write(path, text):
    with open(path, "w", newline="") as f:
        f.write(text)


def emit(report, out_dir, fmt="json"):
    """Write *report* under *out_dir*; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    if fmt == "json":
        path = os.path.join(out_dir, REPORT_FILE)
        _write(path, to_json(report))
        _logger.debug("Wrote %s.", path)
        return [path]

    written = []
    files = []
    for name, headers, rows in csv_tables(report):
        path = os.path.join(out_dir, name)
        _write(path, format_csv(headers, rows))
        written.append(path)
        files.append(name)
    manifest = OrderedDict(
        [
            ("tool", report.to_serializable()["tool"]),
            ("scenario", report.to_serializable()["scenario"]),
            ("stages", list(report.stages)),
            ("files", files),
        ]
    )
    path = os.path.join(out_dir, MANIFEST_FILE)
    _write(path, json.dumps(plain(manifest), sort_keys=True, indent=2) + "\n")
    written.append(path)
    _logger.debug("Wrote %d files to %s.", len(written), out_dir)
    return written


def read_report(path):
    with open(path) as f:
        return json.load(f)
