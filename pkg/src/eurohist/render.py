"""Serialise analysis reports to CSV or JSON bytes.

Both formats are deterministic: the same report and options always give
the same bytes. Reals are rounded to ``OutputSpec.precision`` decimals.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__
from .analyses import AnalysisReport, Table
from .dataset import TimeSeries
from .errors import DomainError
from .stats_tests import BreakResult, TestResult

REPORT_SCHEMA_VERSION = 1


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class OutputSpec:
    format: OutputFormat = OutputFormat.JSON
    plot_path: Path | None = None
    precision: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "format", OutputFormat(self.format))
        if not 1 <= self.precision <= 12:
            raise DomainError(f"precision must be in [1, 12], got {self.precision}")


def _plain(value, precision: int):
    """Recursively convert to JSON-ready values with reals rounded."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return None
        v = round(v, precision)
        return 0.0 if v == 0 else v  # no "-0.0"
    if isinstance(value, dict):
        return {str(k): _plain(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v, precision) for v in value]
    return value


def table_to_dict(table: Table) -> dict:
    return {
        "row_header": table.row_header,
        "columns": list(table.columns),
        "rows": [{"label": label, "values": list(cells)}
                 for label, cells in zip(table.row_labels, table.cells)],
    }


def series_to_list(series: TimeSeries) -> list[dict]:
    return [{"season": s.label, "ordinal": s.ordinal, "fork": s.fork.value, "value": v}
            for s, v in series.entries]


def test_to_dict(result: TestResult | BreakResult) -> dict:
    return result.to_dict()


def report_to_dict(report: AnalysisReport) -> dict:
    return {
        "version": REPORT_SCHEMA_VERSION,
        "package_version": __version__,
        "analysis": report.analysis_id.value,
        "parameters": dict(report.parameters),
        "tables": {name: table_to_dict(t) for name, t in report.tables.items()},
        "series": {name: series_to_list(s) for name, s in report.series.items()},
        "tests": {name: test_to_dict(t) for name, t in report.tests.items()},
        "notes": list(report.notes),
    }


def _cell(value, precision: int) -> str:
    value = _plain(value, precision)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"), ensure_ascii=False)
    return str(value)


def _render_csv(report: AnalysisReport, precision: int) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow([f"# analysis: {report.analysis_id.value}"])
    out.writerow([f"# version: {REPORT_SCHEMA_VERSION}"])
    for name, table in report.tables.items():
        out.writerow([f"# table: {name}"])
        out.writerow([table.row_header, *table.columns])
        for label, cells in zip(table.row_labels, table.cells):
            out.writerow([label, *(_cell(c, precision) for c in cells)])
    for name, series in report.series.items():
        out.writerow([f"# series: {name}"])
        out.writerow(["season", "ordinal", "fork", "value"])
        for s, v in series.entries:
            out.writerow([s.label, s.ordinal, s.fork.value, _cell(v, precision)])
    if report.tests:
        out.writerow(["# tests"])
        out.writerow(["test", "method", "statistic", "p_value", "alternative", "details"])
        for name, result in report.tests.items():
            d = test_to_dict(result)
            details = {k: v for k, v in d.items()
                       if k not in ("method", "statistic", "p_value", "alternative")}
            out.writerow([name, d["method"], _cell(d["statistic"], precision),
                          _cell(d["p_value"], precision), d["alternative"],
                          _cell(details, precision)])
    if report.notes:
        out.writerow(["# notes"])
        for note in report.notes:
            out.writerow([note])
    return buf.getvalue()


def render_report(report: AnalysisReport, spec: OutputSpec) -> bytes:
    """Report as UTF-8 bytes in the requested format."""
    if spec.format is OutputFormat.JSON:
        text = json.dumps(_plain(report_to_dict(report), spec.precision),
                          indent=2, ensure_ascii=False) + "\n"
    else:
        text = _render_csv(report, spec.precision)
    return text.encode("utf-8")


def read_csv_section(text: str, section: str | None) -> list[dict[str, str]]:
    """Rows of one ``# table:``/``# series:`` section, or of a plain CSV when ``section`` is None."""
    lines = text.splitlines()
    if section is not None:
        start = None
        for i, line in enumerate(lines):
            head = next(csv.reader([line]), [""])
            if head and head[0] in (f"# table: {section}", f"# series: {section}"):
                start = i + 1
                break
        if start is None:
            raise DomainError(f"section {section!r} not found")
        end = start
        while end < len(lines) and not lines[end].startswith("#"):
            end += 1
        lines = lines[start:end]
    return list(csv.DictReader(lines))
