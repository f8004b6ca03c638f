"""
Shared AR(p) building blocks used by every other script in this repo.

Domain types (ARModel, ChangepointConfig, TheoreticalMoments, AcfEstimate),
the error hierarchy, causality checks, AR simulation, mean-shift injection,
differencing, sample ACVF of the differenced series and exact theoretical
moments used as oracles throughout the tests.

Series are plain 1-D float64 numpy arrays. Time is 1-based wherever a user
sees it: a changepoint at tau means the new mean starts at t = tau + 1.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

CAUSAL_TOL = 1e-10
FLAT_RTOL = 100 * np.finfo(np.float64).eps
DEFAULT_BURNIN_BASE = 500


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class DiffYWError(Exception):
    """Base class for all errors raised by this repo."""


class InvalidInputError(DiffYWError, ValueError):
    pass


class InvalidModelError(InvalidInputError):
    pass


class InvalidConfigError(InvalidInputError):
    pass


class DegenerateSeriesError(DiffYWError):
    pass


class NumericalDegeneracyError(DiffYWError):
    pass


class CannotBootstrapError(DiffYWError):
    pass


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

def as_series(values, min_length=2, name="series"):
    """Validate and convert input to a finite 1-D float64 array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise InvalidInputError(f"{name} needs at least {min_length} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def _as_coeffs(coeffs):
    arr = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("AR coefficients must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("AR coefficients must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class ARModel:
    """Causal AR(p): eps_t = phi_1 eps_{t-1} + ... + phi_p eps_{t-p} + Z_t, Var(Z_t) = noise_var."""

    coeffs: np.ndarray
    noise_var: float = 1.0

    def __post_init__(self):
        coeffs = _as_coeffs(self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        noise_var = float(self.noise_var)
        if not np.isfinite(noise_var) or noise_var <= 0:
            raise InvalidModelError(f"noise variance must be positive and finite, got {self.noise_var}")
        object.__setattr__(self, "noise_var", noise_var)
        moduli = inverse_root_moduli(coeffs)
        if moduli.max() >= 1.0 - CAUSAL_TOL:
            raise InvalidModelError(describe_noncausal(moduli))

    @property
    def order(self):
        return self.coeffs.size

    def to_dict(self):
        return {"order": self.order, "coeffs": self.coeffs.tolist(), "noise_var": self.noise_var}


@dataclass(frozen=True, eq=False)
class ChangepointConfig:
    """Ordered shift times tau_1 < ... < tau_m and segment means mu_0, ..., mu_m."""

    times: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    means: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        times = np.atleast_1d(np.asarray(self.times, dtype=np.int64))
        means = np.atleast_1d(np.asarray(self.means, dtype=np.float64))
        if times.ndim != 1 or means.ndim != 1:
            raise InvalidConfigError("changepoint times and means must be vectors")
        if means.size != times.size + 1:
            raise InvalidConfigError(
                f"need {times.size + 1} segment means for {times.size} changepoints, got {means.size}")
        if times.size and np.any(np.diff(times) <= 0):
            raise InvalidConfigError("changepoint times must be strictly increasing")
        if not np.all(np.isfinite(means)):
            raise InvalidConfigError("segment means must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "means", means)

    @property
    def num_changepoints(self):
        return self.times.size

    def validate(self, n, min_segment=0):
        """Check the times fit a series of length n (each tau in 2..n)."""
        if self.times.size and (self.times[0] < 2 or self.times[-1] > n):
            raise InvalidConfigError(f"changepoint times must lie in 2..{n}, got {self.times.tolist()}")
        if min_segment > 0:
            bounds = np.concatenate(([0], self.times, [n]))
            if np.any(np.diff(bounds) < min_segment):
                raise InvalidConfigError(f"every segment needs at least {min_segment} point(s)")

    def segment_labels(self, n):
        """Segment index s(t) for t = 1..n."""
        return np.searchsorted(self.times, np.arange(1, n + 1), side="left")

    def to_dict(self):
        return {"times": self.times.tolist(), "means": self.means.tolist()}


@dataclass(frozen=True, eq=False)
class TheoreticalMoments:
    acvf: np.ndarray
    acf: np.ndarray

    @property
    def maxlag(self):
        return self.acvf.size - 1


@dataclass(frozen=True, eq=False)
class AcfEstimate:
    """Sample ACVF/ACF of a differenced series; n is the difference-series length."""

    acvf_hat: np.ndarray
    acf_hat: np.ndarray
    n: int

    @property
    def maxlag(self):
        return self.acvf_hat.size - 1


# ---------------------------------------------------------------------------
# Causality and parameterisations
# ---------------------------------------------------------------------------

def companion_matrix(coeffs):
    coeffs = _as_coeffs(coeffs)
    p = coeffs.size
    mat = np.zeros((p, p))
    mat[0, :] = coeffs
    if p > 1:
        mat[1:, :-1] = np.eye(p - 1)
    return mat


def inverse_root_moduli(coeffs):
    """Moduli of the companion eigenvalues, i.e. 1/|z| over the roots of phi(z)."""
    return np.sort(np.abs(np.linalg.eigvals(companion_matrix(coeffs))))[::-1]


def describe_noncausal(moduli):
    worst = float(np.max(moduli))
    if abs(worst - 1.0) <= 1e-8:
        return f"AR coefficients are not causal: unit root (inverse root modulus {worst:.6g})"
    return f"AR coefficients are not causal: inverse root modulus {worst:.6g} >= 1"


def check_causal(coeffs):
    """True iff every root of 1 - phi_1 z - ... - phi_p z^p lies outside the unit circle."""
    return bool(inverse_root_moduli(coeffs).max() < 1.0 - CAUSAL_TOL)


def pacf_to_coeffs(pacf):
    """Durbin-Levinson step-up from reflection coefficients to AR coefficients."""
    pacf = _as_coeffs(pacf)
    if np.any(np.abs(pacf) >= 1):
        raise InvalidInputError("reflection coefficients must have magnitude < 1")
    phi = np.zeros(0)
    for kappa in pacf:
        phi = np.concatenate((phi - kappa * phi[::-1], [kappa]))
    return phi


def coeffs_to_pacf(coeffs):
    """Step-down recursion; the inverse of pacf_to_coeffs for causal models."""
    phi = _as_coeffs(coeffs).copy()
    pacf = np.zeros(phi.size)
    for k in range(phi.size - 1, -1, -1):
        kappa = phi[k]
        pacf[k] = kappa
        if abs(kappa) >= 1:
            raise InvalidModelError(describe_noncausal(inverse_root_moduli(coeffs)))
        phi = (phi[:k] + kappa * phi[:k][::-1]) / (1.0 - kappa * kappa)
    return pacf


def coeffs_from_inverse_roots(inverse_roots, imag_tol=1e-12):
    """
    Expand phi(z) = prod(1 - r_i z) into AR coefficients.

    Complex r_i must come in conjugate pairs; the imaginary residue of the
    expansion is checked against imag_tol and dropped.
    """
    poly = np.array([1.0 + 0j])
    for r in np.atleast_1d(np.asarray(inverse_roots, dtype=np.complex128)):
        poly = np.convolve(poly, np.array([1.0, -r]))
    if np.max(np.abs(poly.imag)) > imag_tol:
        raise InvalidInputError("inverse roots do not close under conjugation")
    return -poly.real[1:]


def random_causal_ar2(rng):
    """Uniform draw from the causal triangle phi1+phi2<1, phi2-phi1<1, |phi2|<1."""
    while True:
        phi1 = rng.uniform(-2.0, 2.0)
        phi2 = rng.uniform(-1.0, 1.0)
        if phi1 + phi2 < 1 and phi2 - phi1 < 1:
            return np.array([phi1, phi2])


def random_changepoint_times(n, m, rng):
    """m distinct times drawn uniformly from {2, ..., n}, sorted."""
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    if m > n - 1:
        raise InvalidConfigError(f"cannot place {m} changepoints in a series of length {n}")
    return np.sort(rng.choice(np.arange(2, n + 1), size=m, replace=False)).astype(np.int64)


def equally_spaced_times(n, m):
    """m changepoints splitting 1..n into m+1 segments of equal length (up to rounding)."""
    return np.array([(k * n) // (m + 1) for k in range(1, m + 1)], dtype=np.int64)


def alternating_means(m, size, start=0.0):
    """Means start, start+size, start, ... so consecutive shifts alternate +size, -size."""
    return start + size * (np.arange(m + 1) % 2)


# ---------------------------------------------------------------------------
# Random streams and simulation
# ---------------------------------------------------------------------------

def replication_rng(master_seed, *key):
    """Independent generator for (master_seed, key); order of use does not matter."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gaussian_innovations(rng, size):
    return rng.standard_normal(size)


def student_t_innovations(df):
    """Unit-variance Student-t innovations; df > 4 keeps the fourth moment finite."""
    if df <= 4:
        raise InvalidInputError(f"Student-t innovations need df > 4, got {df}")
    scale = np.sqrt((df - 2.0) / df)

    def draw(rng, size):
        return rng.standard_t(df, size) * scale

    return draw


def default_burnin(model):
    return 10 * model.order + DEFAULT_BURNIN_BASE


def simulate_ar(model, n, seed=None, burnin=None, innovations=gaussian_innovations):
    """
    Simulate n values of a stationary AR(p) started from zeros.

    Args:
        model: ARModel (causal by construction)
        n: number of values to return
        seed: int, SeedSequence or numpy Generator
        burnin: values discarded before the output (default 10p + 500)
        innovations: callable(rng, size) returning unit-variance white noise
    """
    if not isinstance(model, ARModel):
        raise InvalidModelError("simulate_ar needs an ARModel")
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    burnin = default_burnin(model) if burnin is None else int(burnin)
    if burnin < 0:
        raise InvalidInputError(f"burnin must be >= 0, got {burnin}")
    rng = _as_rng(seed)
    z = innovations(rng, n + burnin) * np.sqrt(model.noise_var)
    eps = lfilter([1.0], np.concatenate(([1.0], -model.coeffs)), z)
    return eps[burnin:]


def apply_mean_shifts(series, config):
    """X_t = eps_t + mu_{s(t)}, with mu_i holding on tau_i + 1 .. tau_{i+1}."""
    x = as_series(series, min_length=1)
    config.validate(x.size)
    return x + config.means[config.segment_labels(x.size)]


def difference(series):
    x = as_series(series, min_length=2)
    return np.diff(x)


# ---------------------------------------------------------------------------
# Theoretical moments (oracles)
# ---------------------------------------------------------------------------

def theoretical_acvf(model, maxlag):
    """
    Exact gamma(0..maxlag) of a causal AR(p).

    Solves the p+1 Yule-Walker equations for lags 0..p, then recurses
    gamma(h) = sum_j phi_j gamma(h-j) for h > p.
    """
    if not isinstance(model, ARModel):
        raise InvalidModelError("theoretical_acvf needs an ARModel")
    if maxlag < 0:
        raise InvalidInputError(f"maxlag must be >= 0, got {maxlag}")
    phi = model.coeffs
    p = phi.size
    # Row h: gamma(h) - sum_j phi_j gamma(|h-j|) = sigma^2 * [h == 0]
    system = np.eye(p + 1)
    for h in range(p + 1):
        for j in range(1, p + 1):
            system[h, abs(h - j)] -= phi[j - 1]
    rhs = np.zeros(p + 1)
    rhs[0] = model.noise_var
    head = np.linalg.solve(system, rhs)

    acvf = np.zeros(max(maxlag, p) + 1)
    acvf[:p + 1] = head
    for h in range(p + 1, acvf.size):
        acvf[h] = np.dot(phi, acvf[h - 1::-1][:p])
    acvf = acvf[:maxlag + 1]
    return TheoreticalMoments(acvf=acvf, acf=acvf / acvf[0])


def theoretical_diff_acvf(moments, h):
    """gamma_d(h) = 2 gamma(h) - gamma(h+1) - gamma(h-1), with gamma(-1) = gamma(1)."""
    h = abs(int(h))
    if h + 1 > moments.maxlag:
        raise InvalidInputError(f"lag {h} needs moments up to lag {h + 1}, have {moments.maxlag}")
    g = moments.acvf
    return float(2.0 * g[h] - g[h + 1] - g[abs(h - 1)])


def theoretical_diff_moments(model, maxlag):
    """Exact gamma_d(0..maxlag) and rho_d(0..maxlag) of the differenced AR(p)."""
    moments = theoretical_acvf(model, maxlag + 1)
    acvf_d = np.array([theoretical_diff_acvf(moments, h) for h in range(maxlag + 1)])
    return TheoreticalMoments(acvf=acvf_d, acf=acvf_d / acvf_d[0])


# ---------------------------------------------------------------------------
# Sample moments
# ---------------------------------------------------------------------------

def is_flat(values, rtol=FLAT_RTOL):
    """True if values are constant up to float64 rounding at their magnitude."""
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return float(np.ptp(values)) <= rtol * scale


def sample_acvf(values, maxlag):
    """Biased, mean-subtracted sample autocovariances 0..maxlag (no validation)."""
    n = values.size
    centered = values - values.mean()
    return np.array([np.dot(centered[:n - h], centered[h:]) / n for h in range(maxlag + 1)])


def sample_diff_acf(diff, maxlag):
    """
    Sample ACVF/ACF of a differenced series.

    gamma_hat(h) = n^-1 sum_{t=1}^{n-h} (d_t - dbar)(d_{t+h} - dbar), rho_hat(h) = gamma_hat(h)/gamma_hat(0).
    """
    if maxlag < 0:
        raise InvalidInputError(f"maxlag must be >= 0, got {maxlag}")
    d = as_series(diff, min_length=maxlag + 2, name="difference series")
    if is_flat(d):
        raise DegenerateSeriesError("differenced series is constant")
    acvf = sample_acvf(d, maxlag)
    return AcfEstimate(acvf_hat=acvf, acf_hat=acvf / acvf[0], n=d.size)
