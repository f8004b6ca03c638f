"""
Minimal mean-shift changepoint detectors: CUSUM, Wild Binary Segmentation and PELT.

Both detectors assume IID Gaussian noise around piecewise-constant means, so
on dependent data they are meant to run on one-step prediction residuals
(see decorrelate.py). Changepoint times are 1-based and mark the last index
of a segment, the same convention as ChangepointConfig.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import median_abs_deviation

from armodel import InvalidInputError, as_series

DEFAULT_INTERVALS = 5000
WBS_THRESHOLD = 1.3
MAD_NORMAL = 0.6745
INTERVAL_BLOCK = 512
PRUNE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Segmentation:
    changepoint_times: np.ndarray
    segment_means: np.ndarray
    objective: float

    @property
    def num_changepoints(self):
        return self.changepoint_times.size

    def to_dict(self):
        return {
            "changepoint_times": self.changepoint_times.tolist(),
            "segment_means": self.segment_means.tolist(),
            "objective": self.objective,
        }


def _segmentation(x, times, objective=None):
    times = np.asarray(sorted(int(t) for t in times), dtype=np.int64)
    bounds = np.concatenate(([0], times, [x.size]))
    means = np.array([x[a:b].mean() for a, b in zip(bounds[:-1], bounds[1:])])
    if objective is None:
        fitted = np.repeat(means, np.diff(bounds))
        objective = float(np.sum((x - fitted) ** 2))
    return Segmentation(changepoint_times=times, segment_means=means, objective=float(objective))


def robust_noise_sd(series):
    """MAD of lag-1 differences / (sqrt(2) * 0.6745); falls back to the plain sd of the differences."""
    d = np.diff(as_series(series))
    sigma = median_abs_deviation(d) / (np.sqrt(2.0) * MAD_NORMAL)
    if sigma == 0:
        sigma = np.std(d) / np.sqrt(2.0)
    return float(sigma)


# ---------------------------------------------------------------------------
# CUSUM
# ---------------------------------------------------------------------------

def _cusum_values(sums, a, b, j):
    """Two-sample contrast of x[a:j] vs x[j:b] (0-based, half-open) from prefix sums."""
    n = b - a
    left_n = j - a
    right_n = b - j
    left = sums[j] - sums[a]
    right = sums[b] - sums[j]
    return np.sqrt(right_n / (n * left_n)) * left - np.sqrt(left_n / (n * right_n)) * right


def _prefix_sums(x):
    return np.concatenate(([0.0], np.cumsum(x)))


def cusum(series, a, b, t):
    """
    CUSUM contrast on x_a..x_b split after x_t (1-based, inclusive, a <= t < b).

    A step of size D between two halves of length L gives magnitude D * sqrt(L / 2).
    """
    x = as_series(series)
    a, b, t = int(a), int(b), int(t)
    if not (1 <= a <= t < b <= x.size):
        raise InvalidInputError(f"need 1 <= a <= t < b <= {x.size}, got a={a}, t={t}, b={b}")
    return float(_cusum_values(_prefix_sums(x), a - 1, b, t))


# ---------------------------------------------------------------------------
# Wild Binary Segmentation
# ---------------------------------------------------------------------------

def draw_intervals(n, num_intervals, rng):
    """Random sub-intervals as 0-based half-open (start, end) with at least two points."""
    lo = rng.integers(1, n + 1, num_intervals)
    hi = rng.integers(1, n + 1, num_intervals)
    starts = np.minimum(lo, hi) - 1
    ends = np.maximum(lo, hi)
    keep = ends - starts >= 2
    return starts[keep], ends[keep]


def _interval_maxima(sums, starts, ends):
    """Max |CUSUM| and its split for each interval, evaluated in blocks."""
    best_val = np.full(starts.size, -np.inf)
    best_split = np.zeros(starts.size, dtype=np.int64)
    for lo in range(0, starts.size, INTERVAL_BLOCK):
        a = starts[lo:lo + INTERVAL_BLOCK, None]
        b = ends[lo:lo + INTERVAL_BLOCK, None]
        offsets = np.arange(1, int((b - a).max()))[None, :]
        valid = offsets < (b - a)
        j = np.minimum(a + offsets, b - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.abs(_cusum_values(sums, a, b, j))
        vals = np.where(valid, vals, -np.inf)
        arg = np.argmax(vals, axis=1)
        best_val[lo:lo + INTERVAL_BLOCK] = vals[np.arange(arg.size), arg]
        best_split[lo:lo + INTERVAL_BLOCK] = j[np.arange(arg.size), arg]
    return best_val, best_split


def wbs_meanshift(series, num_intervals=DEFAULT_INTERVALS, threshold_const=WBS_THRESHOLD,
                  seed=None, sigma=None):
    """
    Wild Binary Segmentation for mean shifts.

    Draws num_intervals random intervals once; on each segment the largest
    |CUSUM| over the drawn intervals inside it (and the segment itself) is
    accepted if it exceeds C * sigma * sqrt(2 log N), then both sides are searched.
    """
    x = as_series(series, min_length=3)
    if num_intervals < 1:
        raise InvalidInputError(f"num_intervals must be >= 1, got {num_intervals}")
    n = x.size
    sigma = robust_noise_sd(x) if sigma is None else float(sigma)
    threshold = threshold_const * sigma * np.sqrt(2.0 * np.log(n))
    floor = 1e-8 * float(np.max(np.abs(x))) * np.sqrt(n)

    rng = np.random.default_rng(seed)
    starts, ends = draw_intervals(n, num_intervals, rng)
    sums = _prefix_sums(x)
    vals, splits = _interval_maxima(sums, starts, ends)

    found = []
    stack = [(0, n)]
    while stack:
        a, b = stack.pop()
        if b - a < 2:
            continue
        own_val, own_split = _interval_maxima(sums, np.array([a]), np.array([b]))
        inside = (starts >= a) & (ends <= b)
        cand_vals = np.concatenate((own_val, vals[inside]))
        cand_splits = np.concatenate((own_split, splits[inside]))
        k = int(np.argmax(cand_vals))
        if cand_vals[k] > threshold and cand_vals[k] > floor:
            j = int(cand_splits[k])
            found.append(j)
            stack.append((j, b))
            stack.append((a, j))
    return _segmentation(x, found)


# ---------------------------------------------------------------------------
# PELT and the unpruned oracle
# ---------------------------------------------------------------------------

def default_penalty(series):
    """2 sigma^2 log N with sigma from robust_noise_sd (unit variance if the series is flat)."""
    x = as_series(series)
    sigma = robust_noise_sd(x)
    return 2.0 * (sigma ** 2 if sigma > 0 else 1.0) * np.log(x.size)


def residual_penalty(residuals, n, noise_var=None):
    """
    2 sigma^2 log n with sigma^2 taken from a decorrelating fit.

    noise_var is the fitted innovation variance; when it is missing or not
    positive the sample variance of the residuals is used instead.
    """
    if noise_var is not None and np.isfinite(noise_var) and noise_var > 0:
        sigma2 = float(noise_var)
    else:
        sigma2 = float(np.var(as_series(residuals)))
    return 2.0 * (sigma2 if sigma2 > 0 else 1.0) * np.log(n)


def _cost_sums(x):
    centered = x - x.mean()
    return _prefix_sums(centered), _prefix_sums(centered ** 2)


def _segment_cost(s1, s2, starts, t):
    """Sum of squared deviations from the mean of x[s:t] for each s in starts."""
    length = t - starts
    total = s1[t] - s1[starts]
    return (s2[t] - s2[starts]) - total * total / length


def _check_penalty(x, penalty):
    penalty = default_penalty(x) if penalty is None else float(penalty)
    if not penalty > 0 or not np.isfinite(penalty):
        raise InvalidInputError(f"penalty must be positive and finite, got {penalty}")
    return penalty


def _backtrack(last, n):
    times = []
    t = n
    while t > 0:
        s = int(last[t])
        if s > 0:
            times.append(s)
        t = s
    return times[::-1]


def pelt_meanshift(series, penalty=None):
    """
    Exact minimiser of sum of segment costs + penalty * (#changepoints), with PELT pruning.

    Gaussian mean-change cost; minimum segment length 1. Candidates are pruned
    only when strictly worse by more than a rounding margin, so the result is
    identical to optimal_partitioning.
    """
    x = as_series(series)
    penalty = _check_penalty(x, penalty)
    n = x.size
    s1, s2 = _cost_sums(x)
    f = np.empty(n + 1)
    f[0] = -penalty
    last = np.zeros(n + 1, dtype=np.int64)
    candidates = np.array([0], dtype=np.int64)
    for t in range(1, n + 1):
        partial = f[candidates] + _segment_cost(s1, s2, candidates, t)
        best = int(np.argmin(partial))
        f[t] = partial[best] + penalty
        last[t] = candidates[best]
        keep = partial <= f[t] + PRUNE_TOL * (1.0 + abs(f[t]))
        candidates = np.append(candidates[keep], t)
    return _segmentation(x, _backtrack(last, n), objective=f[n])


def optimal_partitioning(series, penalty=None):
    """Unpruned O(N^2) dynamic programme with the same cost and penalty as pelt_meanshift."""
    x = as_series(series)
    penalty = _check_penalty(x, penalty)
    n = x.size
    s1, s2 = _cost_sums(x)
    f = np.empty(n + 1)
    f[0] = -penalty
    last = np.zeros(n + 1, dtype=np.int64)
    for t in range(1, n + 1):
        candidates = np.arange(t)
        partial = f[candidates] + _segment_cost(s1, s2, candidates, t)
        best = int(np.argmin(partial))
        f[t] = partial[best] + penalty
        last[t] = best
    return _segmentation(x, _backtrack(last, n), objective=f[n])
