"""
Empirical checks of the asymptotic behaviour of the difference estimator.

build_B gives the linear map from the ACF of the undifferenced series to the
ACF of the differences. clt_scaling_check simulates shifted AR series at
several lengths and verifies that sqrt(N)(phi_hat - phi) has a stable spread,
no growing bias and a near-normal shape. changepoint_discrepancy measures the
effect of the mean shifts on the sample autocovariance of the differences.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

from armodel import (
    ChangepointConfig,
    InvalidInputError,
    alternating_means,
    apply_mean_shifts,
    as_series,
    difference,
    random_changepoint_times,
    replication_rng,
    sample_acvf,
    sample_diff_acf,
    simulate_ar,
    theoretical_diff_moments,
)
from estimators import diff_yule_walker_from_acf

MIN_CLT_REPS = 200
SD_RATIO_BAND = (0.75, 1.33)
NORMALITY_Z_LIMIT = 4.0
BIAS_TO_SD_LIMIT = 0.5


class SingularScaleError(InvalidInputError):
    pass


# ---------------------------------------------------------------------------
# B matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BMatrix:
    """
    k x (k+2) stencil acting on (rho(0), ..., rho(k+1)).

    Row h applies (-1, 2, -1) to (rho(h-1), rho(h), rho(h+1)) and the whole
    matrix is scaled by 1 / (2 (1 - rho(1))).
    """

    k: int
    rho1: float
    entries: np.ndarray

    @property
    def scale(self):
        return 1.0 / (2.0 * (1.0 - self.rho1))

    @property
    def lag_block(self):
        """Columns for rho(1..k+1): the form with leading row (2, -1, 0, ...), rho(0) = 1 held fixed."""
        return self.entries[:, 1:]

    def apply(self, acf):
        """rho_d(1..k) from rho(0..k+1)."""
        acf = np.asarray(acf, dtype=np.float64)
        if acf.size < self.k + 2:
            raise InvalidInputError(f"need rho(0..{self.k + 1}), got {acf.size} values")
        return self.entries @ acf[:self.k + 2]


def build_B(rho1, k):
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if not abs(rho1) < 1:
        raise SingularScaleError(f"|rho(1)| must be < 1, got {rho1}")
    band = np.zeros((k, k + 2))
    for row in range(k):
        band[row, row:row + 3] = (-1.0, 2.0, -1.0)
    return BMatrix(k=int(k), rho1=float(rho1), entries=band / (2.0 * (1.0 - rho1)))


# ---------------------------------------------------------------------------
# Shift-count generators: callable(n, rng) -> ChangepointConfig
# ---------------------------------------------------------------------------

class NoShifts:
    def __call__(self, n, rng):
        return ChangepointConfig()


class SqrtShifts:
    """m(n) = floor(scale * sqrt(n)) shifts at random times, consecutive shifts bounded by bound."""

    def __init__(self, scale=0.25, bound=1.0):
        self.scale = scale
        self.bound = bound

    def __call__(self, n, rng):
        m = int(np.floor(self.scale * np.sqrt(n)))
        means = rng.uniform(-self.bound / 2, self.bound / 2, m + 1)
        return ChangepointConfig(random_changepoint_times(n, m, rng), means)


class ProportionalShifts:
    """m(n) = fraction * n alternating shifts of a fixed size; breaks m/n -> 0."""

    def __init__(self, fraction=0.1, size=3.0):
        self.fraction = fraction
        self.size = size

    def __call__(self, n, rng):
        m = int(self.fraction * n)
        return ChangepointConfig(random_changepoint_times(n, m, rng), alternating_means(m, self.size))


# ---------------------------------------------------------------------------
# CLT scaling check
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CltCheckReport:
    ns: list
    reps: int
    coeff_sd: np.ndarray          # [len(ns), p] sd of sqrt(N)(phi_hat - phi)
    coeff_bias: np.ndarray        # [len(ns), p] mean of sqrt(N)(phi_hat - phi)
    acf_sd: np.ndarray            # [len(ns), p] sd of sqrt(N)(rho_hat_d - rho_d)
    sd_ratio: np.ndarray          # [p] max/min of coeff_sd across N
    skew_z: np.ndarray            # [p] at the largest N
    kurtosis_z: np.ndarray        # [p] at the largest N
    ratio_ok: bool = False
    bias_ok: bool = False
    normal_ok: bool = False

    @property
    def passed(self):
        return self.ratio_ok and self.bias_ok and self.normal_ok

    def to_dict(self):
        return {
            "ns": list(self.ns),
            "reps": self.reps,
            "coeff_sd": self.coeff_sd.tolist(),
            "coeff_bias": self.coeff_bias.tolist(),
            "acf_sd": self.acf_sd.tolist(),
            "sd_ratio": self.sd_ratio.tolist(),
            "skew_z": self.skew_z.tolist(),
            "kurtosis_z": self.kurtosis_z.tolist(),
            "passed": self.passed,
        }


def _clt_replicate(args):
    model, generator, n, seed, cell, rep = args
    rng = replication_rng(seed, cell, rep)
    config = generator(n, rng)
    x = apply_mean_shifts(simulate_ar(model, n, rng), config)
    acf = sample_diff_acf(difference(x), model.order)
    fit = diff_yule_walker_from_acf(acf, model.order)
    return fit.coeffs, acf.acf_hat[1:]


def clt_scaling_check(model, generator, ns, reps, seed, workers=1, progress=False):
    """
    Monte Carlo check of sqrt(N)-scaling of the difference estimator.

    Args:
        model: true ARModel
        generator: callable(n, rng) -> ChangepointConfig
        ns: at least two series lengths
        reps: replications per length (>= 200)
        seed: master seed; replication r at length index i uses stream (seed, i, r)
    """
    ns = sorted(int(n) for n in ns)
    if len(set(ns)) < 2:
        raise InvalidInputError("need at least two distinct series lengths")
    if reps < MIN_CLT_REPS:
        raise InvalidInputError(f"need at least {MIN_CLT_REPS} replications, got {reps}")
    p = model.order
    truth_rho = theoretical_diff_moments(model, p).acf[1:]

    coeff_sd = np.zeros((len(ns), p))
    coeff_bias = np.zeros((len(ns), p))
    acf_sd = np.zeros((len(ns), p))
    largest = None
    for cell, n in enumerate(ns):
        tasks = [(model, generator, n, seed, cell, r) for r in range(reps)]
        if workers > 1:
            results = process_map(_clt_replicate, tasks, max_workers=workers, desc=f"N={n}",
                                  unit="reps", chunksize=max(1, reps // (4 * workers)), disable=not progress)
        else:
            results = [_clt_replicate(t) for t in tqdm(tasks, desc=f"N={n}", unit="reps", disable=not progress)]
        scaled_coeffs = np.sqrt(n) * (np.vstack([r[0] for r in results]) - model.coeffs)
        scaled_acf = np.sqrt(n) * (np.vstack([r[1] for r in results]) - truth_rho)
        coeff_sd[cell] = scaled_coeffs.std(axis=0, ddof=1)
        coeff_bias[cell] = scaled_coeffs.mean(axis=0)
        acf_sd[cell] = scaled_acf.std(axis=0, ddof=1)
        largest = scaled_coeffs

    sd_ratio = coeff_sd.max(axis=0) / coeff_sd.min(axis=0)
    skew_z = np.atleast_1d(stats.skewtest(largest, axis=0).statistic)
    kurtosis_z = np.atleast_1d(stats.kurtosistest(largest, axis=0).statistic)
    lo, hi = SD_RATIO_BAND
    return CltCheckReport(
        ns=ns, reps=reps, coeff_sd=coeff_sd, coeff_bias=coeff_bias, acf_sd=acf_sd,
        sd_ratio=sd_ratio, skew_z=skew_z, kurtosis_z=kurtosis_z,
        ratio_ok=bool(np.all((sd_ratio >= lo) & (sd_ratio <= hi))),
        bias_ok=bool(np.all(np.abs(coeff_bias) <= BIAS_TO_SD_LIMIT * coeff_sd)),
        normal_ok=bool(np.all(np.abs(skew_z) < NORMALITY_Z_LIMIT) and np.all(np.abs(kurtosis_z) < NORMALITY_Z_LIMIT)),
    )


# ---------------------------------------------------------------------------
# Changepoint discrepancy
# ---------------------------------------------------------------------------

def changepoint_discrepancy(series_clean, series_shifted, h):
    """sqrt(N) |gamma_hat_d(h; shifted) - gamma_hat_d(h; clean)|, N the series length."""
    clean = as_series(series_clean, name="clean series")
    shifted = as_series(series_shifted, name="shifted series")
    if clean.size != shifted.size:
        raise InvalidInputError(f"series lengths differ: {clean.size} vs {shifted.size}")
    h = int(h)
    if h < 0 or h > clean.size - 2:
        raise InvalidInputError(f"lag {h} out of range for length {clean.size}")
    g_clean = sample_acvf(np.diff(clean), h)[h]
    g_shifted = sample_acvf(np.diff(shifted), h)[h]
    return float(np.sqrt(clean.size) * abs(g_shifted - g_clean))
