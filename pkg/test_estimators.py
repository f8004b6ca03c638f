#!/usr/bin/env python3
"""
Tests for estimators.py
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from armodel import (
    AcfEstimate,
    ARModel,
    ChangepointConfig,
    DegenerateSeriesError,
    InvalidInputError,
    NumericalDegeneracyError,
    alternating_means,
    apply_mean_shifts,
    equally_spaced_times,
    pacf_to_coeffs,
    simulate_ar,
    theoretical_acvf,
    theoretical_diff_moments,
)
from estimators import (
    Method,
    ar1seg_estimate,
    bootstrap_se,
    build_diff_yw_system,
    classical_yule_walker,
    diff_noise_variance,
    diff_yule_walker,
    diff_yule_walker_from_acf,
    rolling_window_yw,
    segmented_yule_walker,
    solve_system,
    yule_walker_from_acvf,
)


def _exact_acf(model, p=None):
    """AcfEstimate holding exact difference moments of a model."""
    p = model.order if p is None else p
    moments = theoretical_diff_moments(model, p)
    return AcfEstimate(acvf_hat=moments.acvf, acf_hat=moments.acf, n=0)


def _shifted_ar1(phi, n, seed, m=4, size=3.0):
    config = ChangepointConfig(equally_spaced_times(n, m), alternating_means(m, size))
    return apply_mean_shifts(simulate_ar(ARModel([phi]), n, seed), config), config


# ---------------------------------------------------------------------------
# Difference moment system
# ---------------------------------------------------------------------------

def test_system_p1():
    mat, rhs = build_diff_yw_system([1.0, -0.3], 1)
    np.testing.assert_array_equal(mat, [[0.5]])
    np.testing.assert_allclose(rhs, [0.2], atol=1e-15)


def test_system_p2():
    mat, rhs = build_diff_yw_system([1.0, -0.35, 0.025], 2)
    np.testing.assert_allclose(mat, [[0.5, -0.5], [-0.35, 1.0]], atol=1e-15)
    np.testing.assert_allclose(rhs, [0.15, 0.025], atol=1e-15)


def test_system_p3_first_row():
    mat, _ = build_diff_yw_system([1.0, -0.35, 0.025, 0.01], 3)
    np.testing.assert_allclose(mat[0], [0.5, -0.5, -0.15], atol=1e-15)
    np.testing.assert_allclose(mat[1:], [[-0.35, 1.0, -0.35], [0.025, -0.35, 1.0]], atol=1e-15)


def test_system_rejects_bad_order():
    with pytest.raises(InvalidInputError):
        build_diff_yw_system([1.0, 0.1], 0)
    with pytest.raises(InvalidInputError):
        build_diff_yw_system([1.0, 0.1], 2)


def test_ar2_hand_verified_cell():
    acf = _exact_acf(ARModel([0.5, 0.2]))
    assert acf.acf_hat[1] == pytest.approx(-0.35, abs=1e-14)
    assert acf.acf_hat[2] == pytest.approx(0.025, abs=1e-14)
    fit = diff_yule_walker_from_acf(acf, 2)
    np.testing.assert_allclose(fit.coeffs, [0.5, 0.2], atol=1e-13)
    assert fit.method is Method.DIFF_YW


def test_white_noise_exact_moments():
    fit = diff_yule_walker_from_acf(AcfEstimate(np.array([2.0, -1.0]), np.array([1.0, -0.5]), 0), 1)
    assert fit.coeffs[0] == 0.0


def test_p1_closed_form_identity():
    for rho in np.linspace(-0.99, 0.49, 37):
        mat, rhs = build_diff_yw_system([1.0, rho], 1)
        x, _ = solve_system(mat, rhs)
        assert abs(x[0] - (2 * rho + 1)) <= 1e-15


def test_variance_form_correction():
    acf = _exact_acf(ARModel([0.5]))
    np.testing.assert_allclose(acf.acvf_hat, [4 / 3, -1 / 3], atol=1e-14)
    assert diff_noise_variance([0.5], acf.acvf_hat, "corrected") == pytest.approx(1.0, abs=1e-14)
    # the frequently printed form subtracts gamma_d(0) and is negative here
    assert diff_noise_variance([0.5], acf.acvf_hat, "printed") == pytest.approx(-2 / 3, abs=1e-14)
    with pytest.raises(InvalidInputError):
        diff_noise_variance([0.5], acf.acvf_hat, "other")


def test_exact_moment_round_trip():
    """1000 random causal models, p in 1..6: exact rho_d recovers phi and sigma^2."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        p = int(rng.integers(1, 7))
        model = ARModel(pacf_to_coeffs(rng.uniform(-0.95, 0.95, p)))
        acf = _exact_acf(model)
        fit = diff_yule_walker_from_acf(acf, p)
        np.testing.assert_allclose(fit.coeffs, model.coeffs, rtol=0, atol=1e-10)
        assert abs(fit.noise_var - model.noise_var) <= 1e-10 * max(1.0, acf.acvf_hat[0])


def test_non_causal_fit_is_flagged_not_repaired():
    acf = AcfEstimate(np.array([1.0, 0.4]), np.array([1.0, 0.4]), 100)
    fit = diff_yule_walker_from_acf(acf, 1)
    assert fit.coeffs[0] == pytest.approx(1.8)
    assert not fit.causal
    assert any("not causal" in w for w in fit.warnings)


def test_negative_variance_is_flagged():
    good = diff_yule_walker_from_acf(AcfEstimate(np.array([1.0, -0.45]), np.array([1.0, -0.45]), 100), 1)
    assert good.coeffs[0] == pytest.approx(0.1)
    assert good.noise_var == pytest.approx(0.55)
    assert good.noise_var_valid
    # inconsistent moments: phi = 0.1, sigma^2 = 0.1 * (-1) - 0.45
    fit = diff_yule_walker_from_acf(AcfEstimate(np.array([-1.0, 0.45]), np.array([1.0, -0.45]), 100), 1)
    assert fit.noise_var == pytest.approx(-0.55)
    assert not fit.noise_var_valid
    assert any("not positive" in w for w in fit.warnings)


def test_singular_system_raises():
    acf = AcfEstimate(np.array([1.0, -1.0, 1.0]), np.array([1.0, -1.0, 1.0]), 10)
    with pytest.raises(NumericalDegeneracyError):
        diff_yule_walker_from_acf(acf, 2)


def test_diff_yule_walker_needs_length():
    with pytest.raises(InvalidInputError):
        diff_yule_walker(np.arange(4.0), 2)


def test_diff_yule_walker_degenerate():
    with pytest.raises(DegenerateSeriesError):
        diff_yule_walker(np.arange(30.0), 1)


def test_diff_yule_walker_with_shifts():
    rng_times = np.array([15_000, 35_000, 50_000, 70_000, 85_000])
    config = ChangepointConfig(rng_times, alternating_means(5, 1.0))
    x = apply_mean_shifts(simulate_ar(ARModel([0.6]), 100_000, seed=31), config)
    fit = diff_yule_walker(x, 1)
    assert abs(fit.coeffs[0] - 0.6) < 0.02
    assert fit.diagnostics["n_diff"] == 99_999
    assert fit.diagnostics["condition_number"] >= 1.0


def test_shift_and_trend_invariance():
    x = simulate_ar(ARModel([0.5, -0.3]), 2000, seed=32)
    base = diff_yule_walker(x, 2).coeffs
    np.testing.assert_allclose(diff_yule_walker(x + 17.0, 2).coeffs, base, atol=1e-8)
    trend = 3.0 + 0.01 * np.arange(1, x.size + 1)
    np.testing.assert_allclose(diff_yule_walker(x + trend, 2).coeffs, base, atol=1e-8)
    np.testing.assert_allclose(classical_yule_walker(x + 17.0, 2).coeffs,
                               classical_yule_walker(x, 2).coeffs, atol=1e-8)
    big = x + 1e11
    config = ChangepointConfig([700, 1400], [0.0, 0.0, 0.0])
    fits = [lambda s: diff_yule_walker(s, 2), lambda s: classical_yule_walker(s, 2),
            lambda s: segmented_yule_walker(s, 2, config), lambda s: rolling_window_yw(s, 2, 500)]
    for fit in fits:
        np.testing.assert_allclose(fit(big).coeffs, fit(x).coeffs, atol=1e-3)


# ---------------------------------------------------------------------------
# Comparison estimators
# ---------------------------------------------------------------------------

def test_ar1seg_alternating():
    x = np.tile([0.0, 1.0], 20)
    fit = ar1seg_estimate(x)
    assert fit.coeffs[0] == -1.0
    assert fit.noise_var is None
    assert fit.method is Method.AR1SEG


def test_ar1seg_errors():
    with pytest.raises(InvalidInputError):
        ar1seg_estimate([1.0, 2.0])
    with pytest.raises(DegenerateSeriesError):
        ar1seg_estimate(np.ones(10))


def test_ar1seg_long_series():
    x = simulate_ar(ARModel([0.6]), 100_000, seed=33)
    assert abs(ar1seg_estimate(x).coeffs[0] - 0.6) < 0.05


def test_rolling_full_window_equals_classical():
    x = simulate_ar(ARModel([0.4, 0.2]), 300, seed=34)
    rolled = rolling_window_yw(x, 2, x.size)
    classical = classical_yule_walker(x, 2)
    np.testing.assert_allclose(rolled.coeffs, classical.coeffs, atol=1e-10)
    assert rolled.diagnostics["num_windows"] == 1
    assert rolled.diagnostics["skipped_windows"] == 0


def test_rolling_matches_fits_on_each_window():
    config = ChangepointConfig([50, 90], [0.0, 2.0, -1.0])
    x = apply_mean_shifts(simulate_ar(ARModel([0.5, -0.2]), 120, seed=40), config)
    fits = [classical_yule_walker(x[s:s + 30], 2) for s in range(91)]
    rolled = rolling_window_yw(x, 2, 30)
    np.testing.assert_allclose(rolled.coeffs, np.median([f.coeffs for f in fits], axis=0), atol=1e-10)
    assert rolled.noise_var == pytest.approx(np.median([f.noise_var for f in fits]), abs=1e-10)
    assert rolled.diagnostics["num_windows"] == 91


def test_rolling_long_series_half_window():
    x = simulate_ar(ARModel([0.6]), 100_000, seed=1)
    fit = rolling_window_yw(x, 1, 50_000)
    assert fit.diagnostics["num_windows"] == 50_001
    assert fit.diagnostics["skipped_windows"] == 0
    assert abs(fit.coeffs[0] - 0.6) < 0.02


def test_rolling_errors():
    with pytest.raises(DegenerateSeriesError):
        rolling_window_yw(np.full(50, 2.0), 1, 10)
    x = simulate_ar(ARModel([0.4]), 50, seed=35)
    with pytest.raises(InvalidInputError):
        rolling_window_yw(x, 1, 2)
    with pytest.raises(InvalidInputError):
        rolling_window_yw(x, 1, 51)


def test_rolling_window_ar1_centered():
    estimates = [rolling_window_yw(simulate_ar(ARModel([0.6]), 1000, seed=s), 1, 100).coeffs[0]
                 for s in range(200)]
    assert abs(np.median(estimates) - 0.6) < 0.1


def test_classical_exact_moments():
    fit = yule_walker_from_acvf(theoretical_acvf(ARModel([0.5]), 1).acvf, 1)
    assert fit.coeffs[0] == pytest.approx(0.5, abs=1e-14)
    assert fit.noise_var == pytest.approx(1.0, abs=1e-14)


def test_classical_white_noise():
    x = simulate_ar(ARModel([0.0]), 100_000, seed=36)
    assert abs(classical_yule_walker(x, 1).coeffs[0]) < 0.02


def test_classical_degenerate():
    with pytest.raises(DegenerateSeriesError):
        classical_yule_walker(np.full(20, 1.5), 1)


def test_shifts_bias_classical_not_segmented():
    classical, segmented, diff = [], [], []
    for seed in range(100):
        x, config = _shifted_ar1(0.25, 1000, seed)
        classical.append(classical_yule_walker(x, 1).coeffs[0])
        segmented.append(segmented_yule_walker(x, 1, config).coeffs[0])
        diff.append(diff_yule_walker(x, 1).coeffs[0])
    assert np.mean(classical) > 0.25 + 0.2
    assert abs(np.mean(segmented) - 0.25) < 0.05
    assert abs(np.mean(diff) - 0.25) < 0.05


def test_segmented_without_changepoints_is_classical():
    x = simulate_ar(ARModel([0.3]), 400, seed=37)
    seg = segmented_yule_walker(x, 1, ChangepointConfig())
    np.testing.assert_allclose(seg.coeffs, classical_yule_walker(x, 1).coeffs, atol=1e-14)
    assert seg.method is Method.SEGMENTED_YW


def test_segmented_noiseless_steps_degenerate():
    config = ChangepointConfig([20, 40], [0.0, 3.0, -1.0])
    x = apply_mean_shifts(np.zeros(60), config)
    with pytest.raises(DegenerateSeriesError):
        segmented_yule_walker(x, 1, config)


def test_report_to_dict():
    x = simulate_ar(ARModel([0.3]), 400, seed=38)
    d = diff_yule_walker(x, 1).to_dict()
    assert d["method"] == "diff"
    assert d["order"] == 1
    assert len(d["coeffs"]) == 1
    assert d["diagnostics"]["causal"]


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------

def test_bootstrap_needs_two_reps():
    x = simulate_ar(ARModel([0.6]), 500, seed=39)
    with pytest.raises(InvalidInputError):
        bootstrap_se(x, 1, 0, seed=1)


def test_bootstrap_deterministic():
    x = simulate_ar(ARModel([0.6]), 500, seed=40)
    first = bootstrap_se(x, 1, 20, seed=5)
    np.testing.assert_array_equal(first, bootstrap_se(x, 1, 20, seed=5))
    np.testing.assert_array_equal(first, bootstrap_se(x, 1, 20, seed=5, workers=2))


def test_bootstrap_se_scales_with_sqrt_n():
    short = bootstrap_se(simulate_ar(ARModel([0.6]), 1000, seed=41), 1, 500, seed=7)
    long = bootstrap_se(simulate_ar(ARModel([0.6]), 10_000, seed=42), 1, 500, seed=7)
    assert 2.5 <= short[0] / long[0] <= 4.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
