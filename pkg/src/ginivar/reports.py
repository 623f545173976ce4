"""CSV ingestion and JSON/CSV report emission.

JSON reports carry a ``schema_version`` field, echo the full configuration,
and print numbers at round-trip precision (Python's shortest-repr floats,
>= 15 significant digits), so re-parsing reproduces every numeric field
exactly.  Key order is fixed.  CSV reports flatten to one row per change
point or experiment cell; companion plot-ready CSVs expose the per-block
log variances and the analyzed series for external rendering.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict

from .changepoint import ChangePointSet
from .montecarlo import ExperimentReport
from .series import TimeSeries
from .vartest import TestResult
from .version import SCHEMA_VERSION, __version__

__all__ = [
    "ingest_csv",
    "test_result_to_dict",
    "changepoints_to_dict",
    "experiment_report_to_dict",
    "to_json",
    "test_result_to_csv",
    "changepoints_to_csv",
    "experiment_reports_to_csv",
    "block_stats_csv",
    "series_csv",
]


def _parse_cell(text: str, row: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"non-numeric cell {text!r} in row {row}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {text!r} in row {row}")
    return value


def ingest_csv(path: str, column: int | str | None = None) -> TimeSeries:
    """Read one column of a CSV file as a time series, in file order.

    ``column`` selects by header name or 1-based position (default:
    first column).  A single header row is detected automatically: if the
    selected cell of the first row does not parse as a number, the row is
    skipped.  Non-numeric or non-finite cells elsewhere raise with the
    offending row number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [
            (num, r)
            for num, r in enumerate(csv.reader(fh), start=1)
            if r and any(cell.strip() for cell in r)
        ]
    if not rows:
        raise ValueError(f"{path}: empty input")

    def cell(row: list[str], rownum: int, idx: int) -> str:
        if idx >= len(row):
            raise ValueError(f"row {rownum} has only {len(row)} columns, need {idx + 1}")
        return row[idx].strip()

    if isinstance(column, str):
        header = [c.strip() for c in rows[0][1]]
        if column not in header:
            raise ValueError(f"{path}: no column named {column!r} in header {header}")
        idx = header.index(column)
        data = rows[1:]
    else:
        idx = 0 if column is None else int(column) - 1
        if idx < 0:
            raise ValueError(f"column index must be >= 1, got {column}")
        data = rows
        first_num, first_row = rows[0]
        try:
            float(cell(first_row, first_num, idx))
        except ValueError:
            data = rows[1:]  # single header row, skipped

    values = [_parse_cell(cell(row, num, idx), num) for num, row in data]
    if not values:
        raise ValueError(f"{path}: selected column contains no data")
    return TimeSeries(values, name=str(column) if column is not None else None)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _envelope(kind: str, config: dict | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "ginivar",
        "version": __version__,
        "kind": kind,
        "config": config or {},
    }


def test_result_to_dict(result: TestResult, config: dict | None = None) -> dict:
    d = _envelope("test_result", config)
    p, sub = result.partition, result.lrv_partition
    d.update(
        n=p.n,
        s=result.s,
        q=result.q,
        alpha=result.alpha,
        ell=p.block_len,
        b=p.block_count,
        remainder=p.remainder,
        lrv_ell=sub.block_len,
        lrv_b=sub.block_count,
        u_stat=result.u_stat,
        kappa_hat=result.kappa_hat,
        sigma_h_sq=result.sigma_h_sq,
        t_stat=result.t_stat,
        p_value=result.p_value,
        reject=result.reject,
        block_vars=[float(v) for v in result.block_stats.local_vars],
        block_log_vars=[float(v) for v in result.block_stats.log_local_vars],
    )
    return d


def changepoints_to_dict(cps: ChangePointSet, config: dict | None = None) -> dict:
    d = _envelope("changepoints", config)
    d["points"] = [asdict(p) for p in cps.points]
    d["trace"] = [asdict(r) for r in cps.trace]
    return d


def experiment_report_to_dict(
    reports: ExperimentReport | list[ExperimentReport], config: dict | None = None
) -> dict:
    d = _envelope("experiment", config)
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    d["reports"] = [asdict(r) for r in reports]
    return d


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, allow_nan=False)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def test_result_to_csv(result: TestResult) -> str:
    p = result.partition
    header = [
        "n", "s", "q", "alpha", "ell", "b", "u_stat",
        "kappa_hat", "t_stat", "p_value", "reject",
    ]
    row = [
        p.n, result.s, result.q, result.alpha, p.block_len, p.block_count,
        result.u_stat, result.kappa_hat, result.t_stat, result.p_value,
        result.reject,
    ]
    return _csv_text(header, [row])


def changepoints_to_csv(cps: ChangePointSet) -> str:
    header = ["index", "block_pair", "left_var", "right_var", "depth"]
    rows = [
        [p.index, p.block_pair, p.left_var, p.right_var, p.depth] for p in cps.points
    ]
    return _csv_text(header, rows)


def experiment_reports_to_csv(reports: list[ExperimentReport]) -> str:
    header = [
        "mode", "dgp", "n", "replications", "alpha", "s", "q", "alternative",
        "mean", "differenced", "rejection_rate", "mc_stderr", "nominal_rate",
        "critical_value", "bias", "rmse", "base_seed", "wall_time",
    ]
    rows = []
    for r in reports:
        rows.append([
            r.mode, r.dgp, r.n, r.replications, r.alpha, r.s, r.q,
            r.alternative if r.alternative is not None else "",
            r.mean, r.differenced,
            "" if r.rejection_rate is None else repr(r.rejection_rate),
            "" if r.mc_stderr is None else repr(r.mc_stderr),
            "" if r.nominal_rate is None else repr(r.nominal_rate),
            "" if r.critical_value is None else repr(r.critical_value),
            "" if r.bias is None else repr(r.bias),
            "" if r.rmse is None else repr(r.rmse),
            r.base_seed, repr(r.wall_time),
        ])
    return _csv_text(header, rows)


def block_stats_csv(result: TestResult) -> str:
    """Plot-ready companion: block index against log local variance."""
    rows = [
        [j + 1, float(result.block_stats.local_vars[j]), float(result.block_stats.log_local_vars[j])]
        for j in range(result.partition.block_count)
    ]
    return _csv_text(["block", "local_var", "log_local_var"], rows)


def series_csv(x: TimeSeries) -> str:
    """Plot-ready companion: position against series value."""
    rows = [[t + 1, float(v)] for t, v in enumerate(x.values)]
    return _csv_text(["t", "value"], rows)
