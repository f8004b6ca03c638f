"""
One-step-ahead prediction residuals of a fitted AR(p).

Residuals of a dependent series are close to white noise, so changepoint
detectors built for IID data can run on them. The predictor is truncated:
the first p points have no full history and are dropped.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from armodel import InvalidInputError, as_series
from estimators import diff_yule_walker


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    values: np.ndarray
    offset: int

    def original_time(self, index):
        """1-based time in the input series of the residual at 1-based position index."""
        return int(index) + self.offset


def one_step_residuals(series, coeffs):
    """e_t = X_t - sum_j phi_j X_{t-j} for t = p+1..N."""
    phi = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
    if phi.ndim != 1 or phi.size == 0 or not np.all(np.isfinite(phi)):
        raise InvalidInputError("coefficients must be a non-empty finite vector")
    p = phi.size
    x = as_series(series, min_length=1)
    if x.size <= p:
        raise InvalidInputError(f"series of length {x.size} is too short for order {p}")
    filtered = lfilter(np.concatenate(([1.0], -phi)), [1.0], x)
    return ResidualSeries(values=filtered[p:], offset=p)


def decorrelate(series, p):
    """Fit the difference Yule-Walker estimator and return (report, residuals)."""
    report = diff_yule_walker(series, p)
    return report, one_step_residuals(series, report.coeffs)
