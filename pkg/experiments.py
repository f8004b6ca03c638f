#!/usr/bin/env python3
"""
Seeded Monte Carlo reproductions of the simulation designs.

Designs:
  AR1Compare        AR(1) with random shifts: DiffYW vs AR1seg vs rolling windows
  AR2Consistency    AR(2) from the causal triangle, m = 9 equal segments, N grid
  AR4Consistency    AR(4) from random inverse roots, m = 9 equal segments, N grid
  ShiftSensitivity  AR(1), m = 9 alternating shifts of a fixed size, size grid
  Table1            WBS / PELT changepoint counts on raw vs decorrelated AR(1) series

Replication r of cell c draws everything from its own stream (seed, c, r), so
outputs do not depend on the number of workers. Each run returns one row per
replication (and estimator / coefficient / detector) plus a per-cell summary.

Usage:
  python experiments.py designs/ar1-compare/spec.json --out-dir results/ar1-compare
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
import scipy
import ujson
from scipy import stats
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

from armodel import (
    ARModel,
    ChangepointConfig,
    DiffYWError,
    InvalidInputError,
    alternating_means,
    apply_mean_shifts,
    coeffs_from_inverse_roots,
    equally_spaced_times,
    random_causal_ar2,
    random_changepoint_times,
    replication_rng,
    simulate_ar,
)
from changepoint import DEFAULT_INTERVALS, WBS_THRESHOLD, pelt_meanshift, residual_penalty, wbs_meanshift
from decorrelate import decorrelate
from estimators import ar1seg_estimate, classical_yule_walker, diff_yule_walker, rolling_window_yw
from series_io import dumps_report

NUM_WORKERS = 8
DEFAULT_SEED = 20190611
FAILURE_LIMIT = 0.05
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
FLOAT_FORMAT = "%.10g"


class SpecValidationError(InvalidInputError):
    """Invalid scenario spec; field names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ExperimentFailure(DiffYWError):
    pass


class Design(str, Enum):
    AR1_COMPARE = "AR1Compare"
    AR2_CONSISTENCY = "AR2Consistency"
    AR4_CONSISTENCY = "AR4Consistency"
    SHIFT_SENSITIVITY = "ShiftSensitivity"
    TABLE1 = "Table1"


AR1_ESTIMATORS = ("ar1seg", "diff", "rolling", "classical")
DETECTORS = ("wbs", "pelt")

DESIGN_DEFAULTS = {
    Design.AR1_COMPARE: {
        "ns": [1000], "reps": 500, "estimators": ["ar1seg", "diff", "rolling"],
        "params": {"phi_bound": 0.95, "max_changepoints": 10, "mean_bound": 1.5,
                   "window_divisors": [1, 2, 5, 10, 20, 50]},
    },
    Design.AR2_CONSISTENCY: {
        "ns": [1000, 4000, 16000], "reps": 300, "estimators": ["diff"],
        "params": {"num_changepoints": 9, "shift_size": 2.0},
    },
    Design.AR4_CONSISTENCY: {
        "ns": [1000, 4000, 16000], "reps": 300, "estimators": ["diff"],
        "params": {"num_changepoints": 9, "shift_size": 2.0, "root_bound": 0.9},
    },
    Design.SHIFT_SENSITIVITY: {
        "ns": [1000], "reps": 500, "estimators": ["diff"],
        "params": {"shift_sizes": [0.0, 1.0, 2.0, 3.0, 4.0, 5.0], "num_changepoints": 9, "phi_bound": 0.95},
    },
    Design.TABLE1: {
        "ns": [500], "reps": 200, "estimators": ["diff"],
        "params": {"phis": [0.25, 0.5, 0.75], "changepoint_counts": [0, 3], "snr": 2.0,
                   "detectors": ["wbs", "pelt"], "num_intervals": DEFAULT_INTERVALS,
                   "wbs_threshold": WBS_THRESHOLD, "pelt_penalty": None, "decorrelation_order": 1},
    },
}


# ---------------------------------------------------------------------------
# Scenario spec
# ---------------------------------------------------------------------------

def _positive_int(field, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise SpecValidationError(field, f"must be a positive integer, got {value!r}")
    return int(value)


def _number(field, value, lo=None, hi=None, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float, np.number)) or not np.isfinite(value):
        raise SpecValidationError(field, f"must be a finite number, got {value!r}")
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise SpecValidationError(field, f"must lie in [{lo}, {hi}], got {value!r}")
    return float(value)


def _nonempty_list(field, value):
    if not isinstance(value, (list, tuple)) or len(value) == 0:
        raise SpecValidationError(field, f"must be a non-empty list, got {value!r}")
    return list(value)


def _validate_params(design, params):
    checked = {}
    for key, value in params.items():
        f = f"params.{key}"
        if key in ("phi_bound", "root_bound"):
            checked[key] = _number(f, value, 0.0, 0.999)
        elif key in ("mean_bound", "shift_size", "snr", "wbs_threshold"):
            checked[key] = _number(f, value, 0.0)
        elif key in ("max_changepoints", "num_changepoints"):
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise SpecValidationError(f, f"must be a non-negative integer, got {value!r}")
            checked[key] = value
        elif key in ("num_intervals", "decorrelation_order"):
            checked[key] = _positive_int(f, value)
        elif key == "pelt_penalty":
            checked[key] = _number(f, value, 0.0, allow_none=True)
            if checked[key] == 0.0:
                raise SpecValidationError(f, "must be positive or null")
        elif key == "window_divisors":
            checked[key] = [_positive_int(f, v) for v in _nonempty_list(f, value)]
        elif key == "shift_sizes":
            checked[key] = [_number(f, v, 0.0) for v in _nonempty_list(f, value)]
        elif key == "phis":
            checked[key] = [_number(f, v, -0.999, 0.999) for v in _nonempty_list(f, value)]
        elif key == "changepoint_counts":
            counts = _nonempty_list(f, value)
            if any(isinstance(v, bool) or not isinstance(v, int) or v < 0 for v in counts):
                raise SpecValidationError(f, f"must hold non-negative integers, got {value!r}")
            checked[key] = counts
        elif key == "detectors":
            dets = _nonempty_list(f, value)
            bad = [d for d in dets if d not in DETECTORS]
            if bad:
                raise SpecValidationError(f, f"unknown detector(s) {bad}; choose from {list(DETECTORS)}")
            checked[key] = dets
        else:
            raise SpecValidationError(f, f"not a parameter of design {design.value}")
    return checked


@dataclass
class ScenarioSpec:
    design: Design
    ns: list
    reps: int
    seed: int
    estimators: list = field(default_factory=lambda: ["diff"])
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data, default_seed=DEFAULT_SEED):
        if not isinstance(data, dict):
            raise SpecValidationError("spec", "must be a JSON object")
        unknown = set(data) - {"design", "n", "ns", "reps", "seed", "estimators", "params"}
        if unknown:
            raise SpecValidationError(sorted(unknown)[0], "unknown field")
        try:
            design = Design(data.get("design"))
        except ValueError:
            raise SpecValidationError("design", f"must be one of {[d.value for d in Design]}, got {data.get('design')!r}")
        defaults = DESIGN_DEFAULTS[design]

        if "n" in data and "ns" in data:
            raise SpecValidationError("n", "give either n or ns, not both")
        ns = [data["n"]] if "n" in data else data.get("ns", defaults["ns"])
        ns = [_positive_int("ns", n) for n in _nonempty_list("ns", ns)]
        if any(b <= a for a, b in zip(ns[:-1], ns[1:])):
            raise SpecValidationError("ns", f"series lengths must be strictly ascending, got {ns}")
        if min(ns) < 20:
            raise SpecValidationError("ns", f"series lengths must be at least 20, got {ns}")

        reps = _positive_int("reps", data.get("reps", defaults["reps"]))
        seed = data.get("seed", default_seed)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise SpecValidationError("seed", f"must be a non-negative integer, got {seed!r}")

        estimators = _nonempty_list("estimators", data.get("estimators", defaults["estimators"]))
        allowed = AR1_ESTIMATORS if design is Design.AR1_COMPARE else ("diff",)
        bad = [e for e in estimators if e not in allowed]
        if bad:
            raise SpecValidationError("estimators", f"unknown estimator(s) {bad}; choose from {list(allowed)}")

        params = data.get("params", {})
        if not isinstance(params, dict):
            raise SpecValidationError("params", "must be a JSON object")
        merged = dict(defaults["params"])
        merged.update(_validate_params(design, params))
        return cls(design=design, ns=ns, reps=reps, seed=int(seed), estimators=list(estimators), params=merged)

    @classmethod
    def load(cls, path, default_seed=DEFAULT_SEED):
        try:
            with open(path) as f:
                data = ujson.load(f)
        except ValueError as e:
            raise SpecValidationError("spec", f"{path} is not valid JSON ({e})")
        return cls.from_dict(data, default_seed=default_seed)

    def to_dict(self):
        return {
            "design": self.design.value,
            "ns": list(self.ns),
            "reps": self.reps,
            "seed": self.seed,
            "estimators": list(self.estimators),
            "params": dict(self.params),
        }


@dataclass(eq=False)
class AggregateResult:
    spec: ScenarioSpec
    rows: pd.DataFrame
    summary: pd.DataFrame
    extras: dict = field(default_factory=dict)
    runtime: float = 0.0


# ---------------------------------------------------------------------------
# Scenario generators
# ---------------------------------------------------------------------------

def random_ar4(rng, root_bound=0.9):
    """AR(4) with inverse roots r1, r2 real in (-b, b) and a complex conjugate pair of modulus < b."""
    r1, r2 = rng.uniform(-root_bound, root_bound, 2)
    modulus = rng.uniform(0.0, root_bound)
    angle = rng.uniform(0.0, 2.0 * np.pi)
    r3 = modulus * np.exp(1j * angle)
    return coeffs_from_inverse_roots([r1, r2, r3, np.conj(r3)])


def random_shift_config(n, rng, max_changepoints=10, mean_bound=1.5):
    """m ~ U{0..max}, times uniform on {2..n} without replacement, means ~ U(-b, b)."""
    m = int(rng.integers(0, max_changepoints + 1))
    times = random_changepoint_times(n, m, rng)
    return ChangepointConfig(times, rng.uniform(-mean_bound, mean_bound, m + 1))


def equal_segment_config(n, m, size):
    return ChangepointConfig(equally_spaced_times(n, m), alternating_means(m, size))


def table1_shift_size(phi, snr, noise_var=1.0):
    """Shift magnitude giving |Delta| / sqrt(sigma^2 / (1 - phi^2)) = snr."""
    return snr * np.sqrt(noise_var / (1.0 - phi * phi))


# ---------------------------------------------------------------------------
# Replications
# ---------------------------------------------------------------------------

def _coeff_rows(base, estimator, truth, estimate):
    rows = []
    for j, true_value in enumerate(truth, start=1):
        value = np.nan if estimate is None else float(estimate[j - 1])
        rows.append({**base, "estimator": estimator, "coeff": j, "truth": float(true_value),
                     "estimate": value, "error": value - float(true_value), "failed": estimate is None})
    return rows


def _attempt(fn, *args):
    try:
        return fn(*args).coeffs
    except DiffYWError:
        return None


def _ar1_estimators(spec, n):
    methods = []
    for name in spec.estimators:
        if name == "rolling":
            for k in spec.params["window_divisors"]:
                methods.append((f"rolling_N/{k}", lambda x, w=n // k: rolling_window_yw(x, 1, w)))
        elif name == "diff":
            methods.append(("diff", lambda x: diff_yule_walker(x, 1)))
        elif name == "ar1seg":
            methods.append(("ar1seg", ar1seg_estimate))
        elif name == "classical":
            methods.append(("classical", lambda x: classical_yule_walker(x, 1)))
    return methods


def _replicate_ar1_compare(spec, cell, index, rep):
    params = spec.params
    n = cell["n"]
    rng = replication_rng(spec.seed, index, rep)
    phi = rng.uniform(-params["phi_bound"], params["phi_bound"])
    config = random_shift_config(n, rng, params["max_changepoints"], params["mean_bound"])
    x = apply_mean_shifts(simulate_ar(ARModel([phi]), n, rng), config)
    base = {"cell": index, "n": n, "rep": rep, "num_changepoints": config.num_changepoints}
    rows = []
    for name, method in _ar1_estimators(spec, n):
        rows.extend(_coeff_rows(base, name, [phi], _attempt(method, x)))
    return rows


def _replicate_consistency(spec, cell, index, rep):
    params = spec.params
    n = cell["n"]
    rng = replication_rng(spec.seed, index, rep)
    if spec.design is Design.AR2_CONSISTENCY:
        coeffs = random_causal_ar2(rng)
    else:
        coeffs = random_ar4(rng, params["root_bound"])
    model = ARModel(coeffs)
    config = equal_segment_config(n, params["num_changepoints"], params["shift_size"])
    x = apply_mean_shifts(simulate_ar(model, n, rng), config)
    base = {"cell": index, "n": n, "rep": rep}
    return _coeff_rows(base, "diff", coeffs, _attempt(diff_yule_walker, x, model.order))


def _replicate_shift_sensitivity(spec, cell, index, rep):
    params = spec.params
    n, size = cell["n"], cell["shift_size"]
    rng = replication_rng(spec.seed, index, rep)
    phi = rng.uniform(-params["phi_bound"], params["phi_bound"])
    m = params["num_changepoints"]
    config = ChangepointConfig(random_changepoint_times(n, m, rng), alternating_means(m, size))
    x = apply_mean_shifts(simulate_ar(ARModel([phi]), n, rng), config)
    base = {"cell": index, "n": n, "shift_size": size, "rep": rep}
    return _coeff_rows(base, "diff", [phi], _attempt(diff_yule_walker, x, 1))


def _count_changepoints(detector, series, params, stream, penalty):
    if detector == "wbs":
        seg = wbs_meanshift(series, params["num_intervals"], params["wbs_threshold"], seed=stream)
    else:
        seg = pelt_meanshift(series, penalty)
    return seg.num_changepoints


def _replicate_table1(spec, cell, index, rep):
    params = spec.params
    n, phi, m = cell["n"], cell["phi"], cell["num_changepoints"]
    rng = replication_rng(spec.seed, index, rep)
    config = equal_segment_config(n, m, table1_shift_size(phi, params["snr"]))
    x = apply_mean_shifts(simulate_ar(ARModel([phi]), n, rng), config)
    try:
        fit, decorrelated = decorrelate(x, params["decorrelation_order"])
        residuals = decorrelated.values
    except DiffYWError:
        fit, residuals = None, None

    # raw and decorrelated PELT share one penalty, scaled by the innovation variance
    penalty = params["pelt_penalty"]
    if penalty is None and residuals is not None:
        penalty = residual_penalty(residuals, n, fit.noise_var)

    base = {"cell": index, "n": n, "phi": phi, "num_changepoints": m, "rep": rep}
    rows = []
    for k, detector in enumerate(params["detectors"]):
        for s, (label, series) in enumerate((("raw", x), ("decorrelated", residuals))):
            m_hat = np.nan
            if series is not None:
                try:
                    m_hat = _count_changepoints(detector, series, params,
                                                replication_rng(spec.seed, index, rep, k, s), penalty)
                except DiffYWError:
                    pass
            rows.append({**base, "detector": detector, "series": label, "m_hat": m_hat,
                         "failed": bool(np.isnan(m_hat))})
    return rows


REPLICATORS = {
    Design.AR1_COMPARE: _replicate_ar1_compare,
    Design.AR2_CONSISTENCY: _replicate_consistency,
    Design.AR4_CONSISTENCY: _replicate_consistency,
    Design.SHIFT_SENSITIVITY: _replicate_shift_sensitivity,
    Design.TABLE1: _replicate_table1,
}


def _replicate(args):
    spec, cell, index, rep = args
    return REPLICATORS[spec.design](spec, cell, index, rep)


def design_cells(spec):
    """Grid points of a design, in a fixed order; the position is the cell id."""
    if spec.design is Design.SHIFT_SENSITIVITY:
        return [{"n": n, "shift_size": s} for n in spec.ns for s in spec.params["shift_sizes"]]
    if spec.design is Design.TABLE1:
        return [{"n": n, "phi": phi, "num_changepoints": m}
                for n in spec.ns for phi in spec.params["phis"] for m in spec.params["changepoint_counts"]]
    return [{"n": n} for n in spec.ns]


def _run_replications(spec, workers, progress):
    cells = design_cells(spec)
    tasks = [(spec, cell, i, r) for i, cell in enumerate(cells) for r in range(spec.reps)]
    if progress:
        print(f"Running {spec.design.value}: {len(cells)} cell(s) x {spec.reps:,} replications")
    desc = spec.design.value
    if workers > 1:
        results = process_map(_replicate, tasks, max_workers=workers, desc=desc, unit="reps",
                              chunksize=max(1, len(tasks) // (8 * workers)), disable=not progress)
    else:
        results = [_replicate(t) for t in tqdm(tasks, desc=desc, unit="reps", disable=not progress)]
    return pd.DataFrame([row for chunk in results for row in chunk])


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def _check_failures(summary, keys):
    over = summary[summary["failures"] > FAILURE_LIMIT * summary["reps"]]
    if len(over):
        row = over.iloc[0]
        where = ", ".join(f"{k}={row[k]}" for k in keys)
        raise ExperimentFailure(f"{row['failures']} of {row['reps']} replications failed ({where})")


def summarise_errors(rows, keys):
    """Bias, variance, RMSE and quantiles of estimate - truth per group, failed replications excluded."""
    records = []
    for key, group in rows.groupby(keys, sort=False):
        err = group["error"].to_numpy(dtype=np.float64)
        ok = err[np.isfinite(err)]
        record = dict(zip(keys, key))
        record["reps"] = len(group)
        record["failures"] = int(group["failed"].sum())
        record["bias"] = float(ok.mean()) if ok.size else np.nan
        record["variance"] = float(ok.var(ddof=1)) if ok.size > 1 else np.nan
        record["rmse"] = float(np.sqrt(np.mean(ok ** 2))) if ok.size else np.nan
        qs = np.quantile(ok, QUANTILES) if ok.size else np.full(len(QUANTILES), np.nan)
        for q, value in zip(QUANTILES, qs):
            record[f"q{int(round(q * 100)):02d}"] = float(value)
        records.append(record)
    summary = pd.DataFrame(records)
    _check_failures(summary, keys)
    return summary


def summarise_counts(rows, keys):
    """Mean and replication standard deviation of the detected changepoint count per group."""
    records = []
    for key, group in rows.groupby(keys, sort=False):
        counts = group["m_hat"].to_numpy(dtype=np.float64)
        ok = counts[np.isfinite(counts)]
        record = dict(zip(keys, key))
        record["reps"] = len(group)
        record["failures"] = int(group["failed"].sum())
        record["m_hat_mean"] = float(ok.mean()) if ok.size else np.nan
        record["m_hat_se"] = float(ok.std(ddof=1)) if ok.size > 1 else np.nan
        records.append(record)
    summary = pd.DataFrame(records)
    _check_failures(summary, keys)
    return summary


def _require(spec, *designs):
    if spec.design not in designs:
        raise SpecValidationError("design", f"expected {' or '.join(d.value for d in designs)}, got {spec.design.value}")


def _rmse_ratios(summary):
    """RMSE at the largest N over RMSE at the smallest N, per coefficient."""
    ratios = {}
    for coeff, group in summary.groupby("coeff", sort=True):
        group = group.sort_values("n")
        ratios[f"phi{coeff}"] = float(group["rmse"].iloc[-1] / group["rmse"].iloc[0])
    return ratios


def run_ar1_compare(spec, workers=1, progress=False):
    _require(spec, Design.AR1_COMPARE)
    start = time.perf_counter()
    rows = _run_replications(spec, workers, progress)
    summary = summarise_errors(rows, ["n", "estimator"])
    return AggregateResult(spec, rows, summary, {}, time.perf_counter() - start)


def run_ar2_consistency(spec, workers=1, progress=False):
    _require(spec, Design.AR2_CONSISTENCY)
    start = time.perf_counter()
    rows = _run_replications(spec, workers, progress)
    summary = summarise_errors(rows, ["n", "estimator", "coeff"])
    return AggregateResult(spec, rows, summary, {"rmse_ratio": _rmse_ratios(summary)}, time.perf_counter() - start)


def run_ar4_consistency(spec, workers=1, progress=False):
    _require(spec, Design.AR4_CONSISTENCY)
    start = time.perf_counter()
    rows = _run_replications(spec, workers, progress)
    summary = summarise_errors(rows, ["n", "estimator", "coeff"])
    return AggregateResult(spec, rows, summary, {"rmse_ratio": _rmse_ratios(summary)}, time.perf_counter() - start)


def run_shift_sensitivity(spec, workers=1, progress=False):
    _require(spec, Design.SHIFT_SENSITIVITY)
    start = time.perf_counter()
    rows = _run_replications(spec, workers, progress)
    summary = summarise_errors(rows, ["n", "shift_size", "estimator"])
    spearman = {}
    for n, group in summary.groupby("n", sort=True):
        if len(group) > 1:
            spearman[str(n)] = float(stats.spearmanr(group["shift_size"], group["bias"].abs())[0])
    return AggregateResult(spec, rows, summary, {"spearman_abs_bias": spearman}, time.perf_counter() - start)


def run_table1(spec, workers=1, progress=False):
    _require(spec, Design.TABLE1)
    start = time.perf_counter()
    rows = _run_replications(spec, workers, progress)
    summary = summarise_counts(rows, ["n", "phi", "num_changepoints", "detector", "series"])
    deltas = {str(phi): float(table1_shift_size(phi, spec.params["snr"])) for phi in spec.params["phis"]}
    return AggregateResult(spec, rows, summary, {"shift_size": deltas}, time.perf_counter() - start)


RUNNERS = {
    Design.AR1_COMPARE: run_ar1_compare,
    Design.AR2_CONSISTENCY: run_ar2_consistency,
    Design.AR4_CONSISTENCY: run_ar4_consistency,
    Design.SHIFT_SENSITIVITY: run_shift_sensitivity,
    Design.TABLE1: run_table1,
}


def run_experiment(spec, workers=1, progress=False):
    return RUNNERS[spec.design](spec, workers=workers, progress=progress)


# ---------------------------------------------------------------------------
# Result files
# ---------------------------------------------------------------------------

def build_manifest(result):
    return {
        "spec": result.spec.to_dict(),
        "seed": result.spec.seed,
        "extras": result.extras,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
    }


def write_experiment(result, out_dir):
    """Write replications.csv, summary.csv and manifest.json; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "replications": os.path.join(out_dir, "replications.csv"),
        "summary": os.path.join(out_dir, "summary.csv"),
        "manifest": os.path.join(out_dir, "manifest.json"),
    }
    result.rows.to_csv(paths["replications"], index=False, float_format=FLOAT_FORMAT)
    result.summary.to_csv(paths["summary"], index=False, float_format=FLOAT_FORMAT)
    with open(paths["manifest"], "w") as f:
        f.write(dumps_report(build_manifest(result)))
    return paths


def main():
    parser = argparse.ArgumentParser(description="Run one simulation design and write its result tables")
    parser.add_argument("spec", help="Path to a scenario spec JSON file")
    parser.add_argument("--out-dir", default=".", help="Directory for replications.csv, summary.csv, manifest.json")
    parser.add_argument("--workers", type=int, default=NUM_WORKERS, help=f"Worker processes (default: {NUM_WORKERS})")
    args = parser.parse_args()

    try:
        spec = ScenarioSpec.load(args.spec)
        result = run_experiment(spec, workers=args.workers, progress=True)
    except DiffYWError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)
    paths = write_experiment(result, args.out_dir)
    print(f"Wrote results to {args.out_dir}")
    print(f"  Rows: {len(result.rows):,}")
    print(f"  Summary rows: {len(result.summary):,}")
    print(f"  Runtime: {result.runtime:.1f}s")
    return paths


if __name__ == "__main__":
    main()
