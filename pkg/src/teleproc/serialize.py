"""Readers and writers for the file formats the command line tool speaks.

Path files carry a sampled trajectory (time, position, optional price).
Summary and replication files carry Monte Carlo output.  CSV floats are
written with 17 significant digits so that classification of increments
against the cone boundary survives a round trip; JSON mirrors the CSV
field names exactly and maps undefined values (NaN) to null.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .estimators import EstimateResult
from .montecarlo import McSummary, Replication
from .process import GeometricGridSample, GridSample

SUMMARY_FIELDS = (
    "method", "lambda", "n", "bias", "rmse",
    "min", "max", "pct_valid", "N", "mc_se",
)
REPLICATION_FIELDS = ("rep", "lambda", "n", "method", "estimate", "valid", "converged")
RESULT_FIELDS = (
    "method", "estimate", "valid", "converged",
    "iterations", "bracket_lo", "bracket_hi",
)


def _num(x: float) -> str:
    # full-precision decimal; float64 round-trips exactly at 17 digits
    return format(float(x), ".17g")


def _opt(x: float) -> float | None:
    return None if math.isnan(x) else float(x)


def _flag(b: bool) -> str:
    return "true" if b else "false"


def _parse_flag(s: str) -> bool:
    if s not in ("true", "false"):
        raise ValueError(f"expected true or false, got {s!r}")
    return s == "true"


@dataclass(frozen=True)
class PathData:
    """Raw columns of a parsed path file, before model validation."""

    t: np.ndarray
    x: np.ndarray
    s: np.ndarray | None = None


def _writer(f):
    return csv.writer(f, lineterminator="\n")


# -- path files ---------------------------------------------------------

def write_path_csv(f, sample: GridSample, geometric: GeometricGridSample | None = None) -> None:
    w = _writer(f)
    t = np.arange(sample.n + 1) * sample.delta
    t[-1] = sample.horizon
    if geometric is None:
        w.writerow(("t", "x"))
        for ti, xi in zip(t, sample.values):
            w.writerow((_num(ti), _num(xi)))
    else:
        w.writerow(("t", "x", "s"))
        for ti, xi, si in zip(t, sample.values, geometric.prices):
            w.writerow((_num(ti), _num(xi), _num(si)))


def write_path_json(f, sample: GridSample, geometric: GeometricGridSample | None = None) -> None:
    t = np.arange(sample.n + 1) * sample.delta
    t[-1] = sample.horizon
    record: dict = {"t": list(t), "x": [float(v) for v in sample.values]}
    if geometric is not None:
        record["s"] = [float(p) for p in geometric.prices]
    json.dump(record, f, indent=2)
    f.write("\n")


def render_path_table(sample: GridSample, geometric: GeometricGridSample | None = None) -> str:
    t = np.arange(sample.n + 1) * sample.delta
    t[-1] = sample.horizon
    cols = [("t", t), ("x", sample.values)]
    if geometric is not None:
        cols.append(("s", geometric.prices))
    lines = ["  ".join(f"{name:>14s}" for name, _ in cols)]
    for i in range(sample.n + 1):
        lines.append("  ".join(f"{col[i]:14.8g}" for _, col in cols))
    return "\n".join(lines) + "\n"


def _columns_to_path(columns: dict[str, list[float]], where: str) -> PathData:
    for name in ("t", "x"):
        if name not in columns:
            raise ValueError(f"{where}: missing required column {name!r}")
    t = np.asarray(columns["t"], dtype=float)
    x = np.asarray(columns["x"], dtype=float)
    s = np.asarray(columns["s"], dtype=float) if "s" in columns else None
    if t.size != x.size or (s is not None and s.size != t.size):
        raise ValueError(f"{where}: columns have unequal lengths")
    if t.size < 2:
        raise ValueError(f"{where}: need at least two rows")
    return PathData(t, x, s)


def read_path_csv(f) -> PathData:
    reader = csv.reader(f)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("path file: empty input") from None
    header = [h.strip() for h in header]
    allowed = {"t", "x", "s"}
    if not set(header) <= allowed or len(set(header)) != len(header):
        raise ValueError(f"path file: unexpected header {header!r}")
    rows = []
    for k, row in enumerate(reader):
        if not row:
            continue
        if len(row) != len(header):
            raise ValueError(f"path file: row {k + 1} has {len(row)} fields, expected {len(header)}")
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            raise ValueError(f"path file: row {k + 1} is not numeric: {row!r}") from None
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    return _columns_to_path({h: data[:, j] for j, h in enumerate(header)}, "path file")


def read_path_json(f) -> PathData:
    try:
        record = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"path file: invalid JSON ({e})") from None
    if not isinstance(record, dict):
        raise ValueError("path file: expected a JSON object with t/x arrays")
    columns = {k: record[k] for k in ("t", "x", "s") if k in record}
    return _columns_to_path(columns, "path file")


def read_path_auto(f) -> PathData:
    """Dispatch on the first non-whitespace character: '{' means JSON."""
    text = f.read()
    head = text.lstrip()[:1]
    if head == "{":
        return read_path_json(io.StringIO(text))
    return read_path_csv(io.StringIO(text))


# -- Monte Carlo summaries ----------------------------------------------

def _summary_row(s: McSummary) -> list[str]:
    return [
        s.method, _num(s.rate), str(s.n), _num(s.bias), _num(s.rmse),
        _num(s.min_est), _num(s.max_est), _num(s.pct_valid), str(s.n_used),
        _num(s.mc_se),
    ]


def write_summary_csv(f, summaries: list[McSummary]) -> None:
    w = _writer(f)
    w.writerow(SUMMARY_FIELDS)
    for s in summaries:
        w.writerow(_summary_row(s))


def summary_record(s: McSummary) -> dict:
    return {
        "method": s.method,
        "lambda": float(s.rate),
        "n": int(s.n),
        "bias": _opt(s.bias),
        "rmse": _opt(s.rmse),
        "min": _opt(s.min_est),
        "max": _opt(s.max_est),
        "pct_valid": float(s.pct_valid),
        "N": int(s.n_used),
        "mc_se": _opt(s.mc_se),
    }


def write_summary_json(f, summaries: list[McSummary]) -> None:
    json.dump([summary_record(s) for s in summaries], f, indent=2, allow_nan=False)
    f.write("\n")


def read_summary_csv(f) -> list[McSummary]:
    reader = csv.reader(f)
    header = tuple(next(reader))
    if header != SUMMARY_FIELDS:
        raise ValueError(f"summary file: unexpected header {header!r}")
    out = []
    for row in reader:
        if not row:
            continue
        out.append(McSummary(
            method=row[0], rate=float(row[1]), n=int(row[2]), bias=float(row[3]),
            rmse=float(row[4]), min_est=float(row[5]), max_est=float(row[6]),
            pct_valid=float(row[7]), n_used=int(row[8]), mc_se=float(row[9]),
        ))
    return out


def _stats_close(a: McSummary, b: McSummary) -> bool:
    """Same cell up to refinement rounding (estimates that do not depend
    on the grid still pick up last-bit summation differences across n)."""
    if a.n_used != b.n_used:
        return False
    pairs = ((a.bias, b.bias), (a.rmse, b.rmse), (a.min_est, b.min_est),
             (a.max_est, b.max_est), (a.pct_valid, b.pct_valid))
    for x, y in pairs:
        if math.isnan(x) and math.isnan(y):
            continue
        if not math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-12):
            return False
    return True


def render_summary_table(summaries: list[McSummary]) -> str:
    """Tables 1-4 style text: one block per method, one line per (rate, n).

    Within a method, rows that differ only in n are collapsed to a
    single line with n shown as '*' (the layout a grid-free estimator
    produces).
    """
    lines = []
    by_method: dict[str, list[McSummary]] = {}
    for s in summaries:
        by_method.setdefault(s.method, []).append(s)
    for method, rows in by_method.items():
        lines.append(f"method: {method}")
        lines.append(f"{'lambda':>8s} {'bias':>9s} {'rmse':>8s} {'min':>7s} "
                     f"{'max':>7s} {'%valid':>7s} {'N':>6s} {'n':>7s}")
        by_rate: dict[float, list[McSummary]] = {}
        for s in rows:
            by_rate.setdefault(s.rate, []).append(s)
        for rate, cell_rows in by_rate.items():
            collapsed = len(cell_rows) > 1 and all(
                _stats_close(cell_rows[0], s) for s in cell_rows[1:]
            )
            shown = cell_rows[:1] if collapsed else cell_rows
            for s in shown:
                n_text = "*" if collapsed else str(s.n)
                lines.append(
                    f"{rate:8.2f} {s.bias:+9.3f} {s.rmse:8.3f} {s.min_est:7.2f} "
                    f"{s.max_est:7.2f} {s.pct_valid:7.1f} {s.n_used:6d} {n_text:>7s}"
                )
        lines.append("")
    return "\n".join(lines)


# -- replication dumps ---------------------------------------------------

def write_replications_csv(f, rows: list[Replication]) -> None:
    w = _writer(f)
    w.writerow(REPLICATION_FIELDS)
    for r in rows:
        w.writerow((str(r.rep), _num(r.rate), str(r.n), r.method,
                    _num(r.estimate), _flag(r.valid), _flag(r.converged)))


def read_replications_csv(f) -> list[Replication]:
    reader = csv.reader(f)
    header = tuple(next(reader))
    if header != REPLICATION_FIELDS:
        raise ValueError(f"replication file: unexpected header {header!r}")
    out = []
    for row in reader:
        if not row:
            continue
        out.append(Replication(
            rep=int(row[0]), rate=float(row[1]), n=int(row[2]), method=row[3],
            estimate=float(row[4]), valid=_parse_flag(row[5]),
            converged=_parse_flag(row[6]),
        ))
    return out


# -- single-sample estimate reports --------------------------------------

def result_record(res: EstimateResult) -> dict:
    return {
        "method": res.method,
        "estimate": float(res.estimate),
        "valid": bool(res.valid),
        "converged": bool(res.converged),
        "iterations": int(res.iterations),
        "bracket_lo": float(res.bounds[0]),
        "bracket_hi": float(res.bounds[1]),
    }


def write_results_csv(f, results: list[EstimateResult]) -> None:
    w = _writer(f)
    w.writerow(RESULT_FIELDS)
    for r in results:
        w.writerow((r.method, _num(r.estimate), _flag(r.valid), _flag(r.converged),
                    str(r.iterations), _num(r.bounds[0]), _num(r.bounds[1])))


def write_results_json(f, results: list[EstimateResult]) -> None:
    json.dump([result_record(r) for r in results], f, indent=2)
    f.write("\n")


def render_results_table(results: list[EstimateResult]) -> str:
    lines = [f"{'method':<15s} {'estimate':>18s} {'valid':>6s} {'conv':>5s} "
             f"{'iters':>6s}"]
    for r in results:
        lines.append(f"{r.method:<15s} {r.estimate:18.12g} {_flag(r.valid):>6s} "
                     f"{_flag(r.converged):>5s} {r.iterations:6d}")
    return "\n".join(lines) + "\n"
