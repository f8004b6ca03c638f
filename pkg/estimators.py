"""
AR(p) coefficient estimators for series contaminated by mean shifts.

The main estimator differences the series once, computes the sample
autocorrelations of the differences and solves the p x p moment system
rho_d = M phi. Comparison estimators: the median-of-differences AR(1)
estimator (AR1seg), rolling-window Yule-Walker, classical Yule-Walker on the
raw series and Yule-Walker on a series centred with known segment means.

Estimators never repair their output: a non-causal fit or a non-positive
innovation variance is returned with a flag in the diagnostics.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
import scipy.linalg
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

from armodel import (
    ARModel,
    AcfEstimate,
    CannotBootstrapError,
    DegenerateSeriesError,
    FLAT_RTOL,
    InvalidInputError,
    InvalidModelError,
    NumericalDegeneracyError,
    as_series,
    check_causal,
    difference,
    is_flat,
    replication_rng,
    sample_acvf,
    sample_diff_acf,
    simulate_ar,
)

CONDITION_LIMIT = 1e12
MAX_SKIPPED_WINDOWS = 0.5
MIN_BOOTSTRAP_REPS = 2


class Method(str, Enum):
    DIFF_YW = "diff"
    AR1SEG = "ar1seg"
    ROLLING_WINDOW = "rolling"
    CLASSICAL_YW = "classical"
    SEGMENTED_YW = "segmented"


METHOD_LABELS = {
    Method.CLASSICAL_YW: "Yule-Walker (ignoring changepoints)",
    Method.AR1SEG: "Robust AR1seg",
    Method.DIFF_YW: "Difference Yule-Walker",
    Method.SEGMENTED_YW: "Yule-Walker (given changepoint times)",
    Method.ROLLING_WINDOW: "Rolling-window Yule-Walker",
}


@dataclass(eq=False)
class EstimationReport:
    method: Method
    coeffs: np.ndarray
    noise_var: float = None
    diagnostics: dict = field(default_factory=dict)
    bootstrap_se: np.ndarray = None

    @property
    def order(self):
        return self.coeffs.size

    @property
    def causal(self):
        return bool(self.diagnostics.get("causal", check_causal(self.coeffs)))

    @property
    def noise_var_valid(self):
        return self.noise_var is not None and self.noise_var > 0

    @property
    def warnings(self):
        return list(self.diagnostics.get("warnings", []))

    def to_dict(self):
        return {
            "method": self.method.value,
            "label": METHOD_LABELS[self.method],
            "order": self.order,
            "coeffs": self.coeffs.tolist(),
            "noise_var": self.noise_var,
            "bootstrap_se": None if self.bootstrap_se is None else self.bootstrap_se.tolist(),
            "diagnostics": self.diagnostics,
        }


def _flag(coeffs, noise_var, diagnostics):
    """Attach causality / variance flags without touching the estimates."""
    causal = check_causal(coeffs) if np.all(np.isfinite(coeffs)) else False
    diagnostics["causal"] = causal
    warnings = diagnostics.setdefault("warnings", [])
    if not causal:
        warnings.append("fitted AR model is not causal")
    if noise_var is not None:
        diagnostics["noise_var_valid"] = bool(noise_var > 0)
        if noise_var <= 0:
            warnings.append(f"innovation variance estimate is not positive ({noise_var:.6g})")
    return diagnostics


def _check_order(p):
    if int(p) != p or p < 1:
        raise InvalidInputError(f"AR order must be a positive integer, got {p}")
    return int(p)


# ---------------------------------------------------------------------------
# Difference-based Yule-Walker
# ---------------------------------------------------------------------------

def build_diff_yw_system(acf, p):
    """
    Moment system M phi = rhs relating rho_d to the AR coefficients.

    Row 1: (1/2, -1/2, -(1/2 + rho_d(1)), ..., -(1/2 + sum_{j<=p-2} rho_d(j))),
    rhs_1 = rho_d(1) + 1/2. Rows h = 2..p: M[h, k] = rho_d(|h-1-(k-1)|), rhs_h = rho_d(h).

    Args:
        acf: AcfEstimate or a vector rho_d(0), rho_d(1), ..., rho_d(>= p)
        p: AR order
    """
    p = _check_order(p)
    rho = np.asarray(acf.acf_hat if isinstance(acf, AcfEstimate) else acf, dtype=np.float64)
    if rho.size < p + 1:
        raise InvalidInputError(f"need rho_d up to lag {p}, got lags 0..{rho.size - 1}")

    idx = np.arange(p)
    mat = rho[np.abs(idx[:, None] - idx[None, :])]
    first = np.empty(p)
    first[0] = 0.5
    if p > 1:
        first[1:] = -(0.5 + np.concatenate(([0.0], np.cumsum(rho[1:p - 1]))))
    mat[0, :] = first

    rhs = rho[1:p + 1].copy()
    rhs[0] += 0.5
    return mat, rhs


def solve_system(mat, rhs):
    """Dense LU solve with partial pivoting; returns (solution, condition number)."""
    cond = float(np.linalg.cond(mat))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalDegeneracyError(f"moment system is ill-conditioned (condition number {cond:.3g})")
    return scipy.linalg.solve(mat, rhs), cond


def diff_noise_variance(coeffs, acvf_d, form="corrected"):
    """
    Innovation variance from the difference autocovariances.

    corrected: sum_j phi_j gamma_d(j-1) - gamma_d(1), exact on exact moments.
    printed:   sum_j phi_j gamma_d(j-1) - gamma_d(0), the frequently quoted form,
               which is not a variance estimator (it gives -2 sigma^2 at phi = 0).
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    acvf_d = np.asarray(acvf_d, dtype=np.float64)
    head = float(np.dot(coeffs, acvf_d[:coeffs.size]))
    if form == "corrected":
        return head - float(acvf_d[1])
    if form == "printed":
        return head - float(acvf_d[0])
    raise InvalidInputError(f"unknown variance form {form!r}")


def diff_yule_walker_from_acf(acf, p):
    """Solve the difference moment system for an AcfEstimate (sample or exact)."""
    p = _check_order(p)
    mat, rhs = build_diff_yw_system(acf, p)
    coeffs, cond = solve_system(mat, rhs)
    noise_var = diff_noise_variance(coeffs, acf.acvf_hat, form="corrected")
    diagnostics = _flag(coeffs, noise_var, {"condition_number": cond, "n_diff": int(acf.n)})
    return EstimationReport(Method.DIFF_YW, coeffs, noise_var, diagnostics)


def diff_yule_walker(series, p):
    """phi_hat = M_hat^{-1} rho_hat_d on the lag-1 differences of the series."""
    p = _check_order(p)
    x = as_series(series, min_length=p + 3)
    acf = sample_diff_acf(difference(x), p)
    return diff_yule_walker_from_acf(acf, p)


# ---------------------------------------------------------------------------
# Comparison estimators
# ---------------------------------------------------------------------------

def ar1seg_estimate(series):
    """(median |X_{t+2} - X_t|)^2 / (median |X_{t+1} - X_t|)^2 - 1."""
    x = as_series(series, min_length=3)
    lag1 = np.median(np.abs(x[1:] - x[:-1]))
    lag2 = np.median(np.abs(x[2:] - x[:-2]))
    if lag1 == 0:
        raise DegenerateSeriesError("median absolute lag-1 difference is zero")
    coeffs = np.array([(lag2 / lag1) ** 2 - 1.0])
    return EstimationReport(Method.AR1SEG, coeffs, None, _flag(coeffs, None, {}))


def _batched_yule_walker(acvf, usable):
    """
    Classical Yule-Walker on every row of a (k, p+1) array of autocovariances.

    Returns (coeffs[k, p], noise_var[k], cond[k], ok[k]); rows that are not
    usable or whose Toeplitz system is ill-conditioned come back with ok = False.
    """
    k, p = acvf.shape[0], acvf.shape[1] - 1
    ok = np.asarray(usable, dtype=bool) & (acvf[:, 0] > 0)

    coeffs = np.full((k, p), np.nan)
    noise_var = np.full(k, np.nan)
    cond = np.full(k, np.inf)
    if not ok.any():
        return coeffs, noise_var, cond, ok

    rho = acvf[ok] / acvf[ok, :1]
    idx = np.arange(p)
    toeplitz = rho[:, np.abs(idx[:, None] - idx[None, :])]
    cond[ok] = np.linalg.cond(toeplitz)
    ok &= np.isfinite(cond) & (cond <= CONDITION_LIMIT)
    if not ok.any():
        return coeffs, noise_var, cond, ok

    rho = acvf[ok] / acvf[ok, :1]
    toeplitz = rho[:, np.abs(idx[:, None] - idx[None, :])]
    phi = np.linalg.solve(toeplitz, rho[:, 1:, None])[:, :, 0]
    coeffs[ok] = phi
    noise_var[ok] = acvf[ok, 0] * (1.0 - np.einsum("ij,ij->i", phi, rho[:, 1:]))
    return coeffs, noise_var, cond, ok


def _window_acvf(x, w, p):
    """
    Biased sample ACVF at lags 0..p of every window x[s:s+w], from prefix sums.

    Each window is centred at its own mean; memory stays O(N p) for any w.
    """
    y = x - x.mean()
    k = y.size - w + 1
    s = np.arange(k)
    sums = np.concatenate(([0.0], np.cumsum(y)))
    mean = (sums[s + w] - sums[s]) / w
    acvf = np.empty((k, p + 1))
    for h in range(p + 1):
        cross = np.concatenate(([0.0], np.cumsum(y[:y.size - h] * y[h:])))
        head = sums[s + w - h] - sums[s]
        tail = sums[s + w] - sums[s + h]
        acvf[:, h] = ((cross[s + w - h] - cross[s]) - mean * (head + tail) + (w - h) * mean * mean) / w
    return acvf


def _window_is_flat(x, w):
    rolled = pd.Series(x).rolling(w)
    spread = (rolled.max() - rolled.min()).to_numpy()[w - 1:]
    return spread <= FLAT_RTOL * float(np.max(np.abs(x)))


def yule_walker_from_acvf(acvf, p):
    """Classical Yule-Walker from autocovariances gamma(0..p) (sample or exact)."""
    p = _check_order(p)
    acvf = np.asarray(acvf, dtype=np.float64)
    if acvf.size < p + 1 or acvf[0] <= 0:
        raise InvalidInputError("need a positive gamma(0) and lags up to p")
    rho = acvf[:p + 1] / acvf[0]
    coeffs, cond = solve_system(scipy.linalg.toeplitz(rho[:p]), rho[1:p + 1])
    noise_var = float(acvf[0] * (1.0 - np.dot(coeffs, rho[1:p + 1])))
    return EstimationReport(Method.CLASSICAL_YW, coeffs, noise_var,
                            _flag(coeffs, noise_var, {"condition_number": cond}))


def classical_yule_walker(series, p):
    """Yule-Walker on the mean-subtracted series, ignoring any changepoints."""
    p = _check_order(p)
    x = as_series(series, min_length=p + 2)
    acvf = sample_acvf(x, p)[None, :]
    coeffs, noise_var, cond, ok = _batched_yule_walker(acvf, [not is_flat(x)])
    if not ok[0]:
        if np.isfinite(cond[0]):
            raise NumericalDegeneracyError(f"Yule-Walker system is ill-conditioned (condition number {cond[0]:.3g})")
        raise DegenerateSeriesError("series is constant")
    diagnostics = _flag(coeffs[0], noise_var[0], {"condition_number": float(cond[0])})
    return EstimationReport(Method.CLASSICAL_YW, coeffs[0], float(noise_var[0]), diagnostics)


def rolling_window_yw(series, p, w):
    """
    Coordinate-wise median of classical Yule-Walker fits over all N-w+1 windows.

    Windows that cannot be fitted are skipped and counted; more than half
    skipped is treated as a degenerate series.
    """
    p = _check_order(p)
    x = as_series(series, min_length=p + 2)
    w = int(w)
    if w < p + 2 or w > x.size:
        raise InvalidInputError(f"window length must lie in {p + 2}..{x.size}, got {w}")
    acvf = _window_acvf(x, w, p)
    coeffs, noise_var, cond, ok = _batched_yule_walker(acvf, ~_window_is_flat(x, w))
    skipped = int((~ok).sum())
    if skipped == ok.size or skipped > MAX_SKIPPED_WINDOWS * ok.size:
        raise DegenerateSeriesError(f"{skipped} of {ok.size} windows could not be fitted")
    med_coeffs = np.median(coeffs[ok], axis=0)
    med_var = float(np.median(noise_var[ok]))
    diagnostics = {
        "window": w,
        "num_windows": int(ok.size),
        "skipped_windows": skipped,
        "condition_number": float(np.max(cond[ok])),
    }
    return EstimationReport(Method.ROLLING_WINDOW, med_coeffs, med_var,
                            _flag(med_coeffs, med_var, diagnostics))


def center_segments(series, config):
    """Subtract each segment's sample mean (segments defined by config.times)."""
    x = as_series(series, min_length=2)
    config.validate(x.size, min_segment=1)
    labels = config.segment_labels(x.size)
    sums = np.bincount(labels, weights=x, minlength=config.num_changepoints + 1)
    counts = np.bincount(labels, minlength=config.num_changepoints + 1)
    return x - (sums / counts)[labels]


def segmented_yule_walker(series, p, config):
    """Classical Yule-Walker after removing known segment means."""
    p = _check_order(p)
    x = as_series(series, min_length=p + 2)
    centered = center_segments(x, config)
    grouped = pd.Series(x).groupby(config.segment_labels(x.size))
    spread = (grouped.max() - grouped.min()).to_numpy()
    if np.all(spread <= FLAT_RTOL * float(np.max(np.abs(x)))):
        raise DegenerateSeriesError("series is constant within every segment")
    report = classical_yule_walker(centered, p)
    report.method = Method.SEGMENTED_YW
    report.diagnostics["num_changepoints"] = int(config.num_changepoints)
    return report


# ---------------------------------------------------------------------------
# Parametric bootstrap
# ---------------------------------------------------------------------------

def _bootstrap_replicate(args):
    coeffs, noise_var, n, seed, rep = args
    model = ARModel(coeffs, noise_var)
    x = simulate_ar(model, n, replication_rng(seed, rep))
    return diff_yule_walker(x, model.order).coeffs


def bootstrap_se(series, p, reps, seed, workers=1, progress=False):
    """
    Parametric bootstrap standard errors of the difference estimator.

    Replication r simulates from the fitted model with its own stream
    (seed, r), so results do not depend on the worker count.
    """
    if reps < MIN_BOOTSTRAP_REPS:
        raise InvalidInputError(f"bootstrap needs at least {MIN_BOOTSTRAP_REPS} replications, got {reps}")
    x = as_series(series)
    fit = diff_yule_walker(x, p)
    if not fit.causal or not fit.noise_var_valid:
        raise CannotBootstrapError("fitted model is not causal or has a non-positive innovation variance")
    try:
        ARModel(fit.coeffs, fit.noise_var)
    except InvalidModelError as e:
        raise CannotBootstrapError(str(e)) from e

    tasks = [(fit.coeffs, fit.noise_var, x.size, seed, r) for r in range(reps)]
    if workers > 1:
        results = process_map(_bootstrap_replicate, tasks, max_workers=workers,
                              desc="Bootstrap", unit="reps", chunksize=max(1, reps // (4 * workers)),
                              disable=not progress)
    else:
        results = [_bootstrap_replicate(t) for t in tqdm(tasks, desc="Bootstrap", unit="reps",
                                                          disable=not progress)]
    return np.std(np.vstack(results), axis=0, ddof=1)
