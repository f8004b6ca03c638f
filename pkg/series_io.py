#!/usr/bin/env python3
"""
Shared utility for reading series files and writing reports, residuals and truth sidecars.

Input is plain delimited text: one value per line, or a CSV with a header row
when a column is named. Lines starting with '#' and blank lines are skipped,
and parse errors name the line in the original file.
"""

import io
import os
import re

import numpy as np
import pandas as pd
import ujson

from armodel import ARModel, ChangepointConfig, DiffYWError

TRUTH_SUFFIX = ".truth.json"
VALUE_FORMAT = "%.17g"


class SeriesParseError(DiffYWError):
    def __init__(self, path, line, message):
        where = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


def _data_lines(path):
    """(line numbers, text) of the lines that hold data."""
    try:
        with open(path, "r") as f:
            raw = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise SeriesParseError(path, None, f"cannot read file ({e})")
    numbers, kept = [], []
    for i, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        numbers.append(i)
        kept.append(stripped)
    return numbers, kept


def _to_numeric(path, values, line_numbers, name):
    """Convert a column of strings to floats; the first bad entry raises with its line."""
    numeric = pd.to_numeric(values, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(numeric))
    if bad.size:
        k = int(bad[0])
        raise SeriesParseError(path, line_numbers[k], f"{name} value {values.iloc[k]!r} is not a finite number")
    return numeric


def read_series(path, column=None, denominator_column=None):
    """
    Read a numeric series from a text file.

    Args:
        path: file with one value per line, or a CSV with a header when column is given
        column: name of the column holding the series
        denominator_column: optional second column; the series is column / denominator_column

    Returns:
        1-D float64 numpy array
    """
    if denominator_column is not None and column is None:
        raise SeriesParseError(path, None, "denominator column given without a column")
    numbers, kept = _data_lines(path)
    if not kept or (column is not None and len(kept) < 2):
        raise SeriesParseError(path, None, "no numeric values found")

    header = 0 if column is not None else None
    try:
        df = pd.read_csv(io.StringIO("\n".join(kept)), header=header, dtype=str,
                         skipinitialspace=True, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = numbers[int(match.group(1)) - 1] if match and int(match.group(1)) <= len(numbers) else None
        raise SeriesParseError(path, line, "inconsistent number of fields")
    rows = numbers[1:] if column is not None else numbers

    if column is None:
        if df.shape[1] != 1:
            raise SeriesParseError(path, numbers[0], f"expected one value per line, got {df.shape[1]} fields; "
                                                     "name a column to read CSV input")
        return _to_numeric(path, df.iloc[:, 0], rows, "series")

    for name in (column, denominator_column):
        if name is not None and name not in df.columns:
            raise SeriesParseError(path, numbers[0], f"column {name!r} not found (have {list(df.columns)})")
    values = _to_numeric(path, df[column], rows, column)
    if denominator_column is None:
        return values
    denominator = _to_numeric(path, df[denominator_column], rows, denominator_column)
    zero = np.flatnonzero(denominator == 0)
    if zero.size:
        raise SeriesParseError(path, rows[int(zero[0])], f"{denominator_column} is zero")
    return values / denominator


def write_series(path, values, header_lines=()):
    """One value per line at full precision, optional '#' header lines first."""
    with open(path, "w") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        np.savetxt(f, np.asarray(values, dtype=np.float64), fmt=VALUE_FORMAT)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def dumps_report(report):
    return ujson.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def write_report(path, report):
    """Structured key-value report (JSON, sorted keys) of an estimation or residuals run."""
    with open(path, "w") as f:
        f.write(dumps_report(report))


# ---------------------------------------------------------------------------
# Truth sidecars
# ---------------------------------------------------------------------------

def truth_path(series_path):
    return series_path + TRUTH_SUFFIX


def write_truth_sidecar(series_path, model, config, seed, n, burnin):
    """Record the generating model and changepoints next to a simulated series."""
    path = truth_path(series_path)
    meta = {
        "model": model.to_dict(),
        "changepoints": config.to_dict(),
        "seed": seed,
        "n": int(n),
        "burnin": int(burnin),
    }
    with open(path, "w") as f:
        f.write(dumps_report(meta))
    return path


def read_truth_sidecar(path):
    """Returns (ARModel, ChangepointConfig, raw dict)."""
    if not os.path.exists(path):
        raise SeriesParseError(path, None, "truth sidecar not found")
    try:
        with open(path) as f:
            meta = ujson.load(f)
        model = ARModel(meta["model"]["coeffs"], meta["model"]["noise_var"])
        config = ChangepointConfig(meta["changepoints"]["times"], meta["changepoints"]["means"])
    except (ValueError, KeyError, TypeError) as e:
        raise SeriesParseError(path, None, f"malformed truth sidecar ({e})")
    return model, config, meta


# ---------------------------------------------------------------------------
# Residual files
# ---------------------------------------------------------------------------

def write_residuals(path, residuals, report):
    """Residual series with the fitted model in '#' header lines."""
    header = [
        f"one-step residuals of a fitted AR({report.order}), method {report.method.value}",
        "coeffs: " + " ".join(VALUE_FORMAT % c for c in report.coeffs),
        f"noise_var: {VALUE_FORMAT % report.noise_var}",
        f"offset: {residuals.offset} (residual i is input time i + {residuals.offset})",
    ]
    write_series(path, residuals.values, header)
