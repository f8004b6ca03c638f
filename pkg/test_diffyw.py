#!/usr/bin/env python3
"""
Tests for diffyw.py
"""

import os
import sys

import numpy as np
import pandas as pd
import pytest
import ujson

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from armodel import InvalidInputError
from diffyw import EXIT_INVALID, EXIT_OK, EXIT_PARSE, build_parser, main, resolve_config
from series_io import read_series, read_truth_sidecar, truth_path


def _simulate(tmp_path, name="sim.txt", *extra):
    path = str(tmp_path / name)
    code = main(["simulate", "--output", path, *extra], environ={})
    assert code == EXIT_OK
    return path


def _read(path):
    with open(path, "rb") as f:
        return f.read()


def _flat(text):
    return " ".join(text.split())


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_writes_series_and_truth(tmp_path):
    path = _simulate(tmp_path, "sim.txt", "--coeffs", "0.5", "--n", "100", "--seed", "1")
    x = read_series(path)
    assert x.size == 100
    assert np.all(np.isfinite(x))
    model, config, meta = read_truth_sidecar(truth_path(path))
    assert model.coeffs.tolist() == [0.5]
    assert config.num_changepoints == 0
    assert meta["seed"] == 1


def test_simulate_is_reproducible(tmp_path):
    args = ("--coeffs", "0.5,-0.2", "--n", "200", "--seed", "3", "--changepoints", "80", "--means", "0,2")
    a = _simulate(tmp_path, "a.txt", *args)
    b = _simulate(tmp_path, "b.txt", *args)
    assert _read(a) == _read(b)


def test_simulate_unit_root(tmp_path, capsys):
    code = main(["simulate", "--coeffs", "1", "--n", "100", "--output", str(tmp_path / "x.txt")], environ={})
    assert code == EXIT_INVALID
    assert "unit root" in _flat(capsys.readouterr().err)


def test_simulate_needs_length(tmp_path):
    assert main(["simulate", "--coeffs", "0.5", "--output", str(tmp_path / "x.txt")], environ={}) == EXIT_INVALID


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

def test_estimate_all_methods(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.6", "--n", "20000", "--seed", "11",
                       "--changepoints", "4000,8000,12000,16000", "--means", "0,3,0,3,0")
    out = str(tmp_path / "report.json")
    code = main(["estimate", "--input", series, "--p", "1", "--all", "--changepoints", "4000,8000,12000,16000",
                 "--truth", truth_path(series), "--output", out], environ={})
    assert code == EXIT_OK
    with open(out) as f:
        report = ujson.load(f)
    estimates = {e["method"]: e for e in report["estimates"]}
    assert set(estimates) == {"classical", "ar1seg", "diff", "segmented"}
    diff = estimates["diff"]["coeffs"][0]
    segmented = estimates["segmented"]["coeffs"][0]
    assert abs(diff - segmented) < 0.05
    assert estimates["classical"]["coeffs"][0] > max(diff, segmented) + 0.1
    assert report["truth"]["model"]["coeffs"] == [0.6]
    assert abs(estimates["diff"]["coeff_error"][0]) < 0.05


def test_estimate_is_byte_identical(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.4", "--n", "500", "--seed", "5")
    outputs = []
    for name in ("a.json", "b.json"):
        out = str(tmp_path / name)
        assert main(["estimate", "--input", series, "--p", "2", "--bootstrap-reps", "20", "--seed", "9",
                     "--output", out], environ={}) == EXIT_OK
        outputs.append(_read(out))
    assert outputs[0] == outputs[1]
    report = ujson.loads(outputs[0])
    assert len(report["estimates"][0]["bootstrap_se"]) == 2


def test_estimate_default_output_location(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.4", "--n", "300", "--seed", "5")
    out_dir = tmp_path / "out"
    assert main(["estimate", "--input", series, "--out-dir", str(out_dir)], environ={}) == EXIT_OK
    assert (out_dir / "estimate_report.json").exists()


def test_estimate_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("# no data\n")
    assert main(["estimate", "--input", str(path)], environ={}) == EXIT_PARSE
    assert "no numeric values" in _flat(capsys.readouterr().err)


def test_estimate_missing_file(tmp_path):
    assert main(["estimate", "--input", str(tmp_path / "absent.txt")], environ={}) == EXIT_PARSE


def test_estimate_constant_series_is_numerical_failure(tmp_path, capsys):
    path = tmp_path / "flat.txt"
    path.write_text("\n".join(["2.5"] * 50) + "\n")
    assert main(["estimate", "--input", str(path)], environ={}) == 5
    assert "[diff]" in _flat(capsys.readouterr().err)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def test_residuals_detect(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.5", "--n", "1000", "--seed", "21",
                       "--changepoints", "500", "--means", "0,4")
    out = str(tmp_path / "resid.txt")
    assert main(["residuals", "--input", series, "--detect", "pelt", "--output", out], environ={}) == EXIT_OK
    assert read_series(out).size == 999
    with open(out + ".report.json") as f:
        report = ujson.load(f)
    assert report["offset"] == 1
    times = report["detection"]["changepoint_times"]
    assert any(abs(t - 500) <= 2 for t in times)
    assert [t - 1 for t in times] == report["detection"]["residual_times"]
    noise_var = report["estimates"][0]["noise_var"]
    assert report["detection"]["penalty"] == pytest.approx(2 * noise_var * np.log(1000))


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def test_experiment_rerun_identical(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(ujson.dumps({"design": "ShiftSensitivity", "ns": [200], "reps": 50,
                                 "params": {"shift_sizes": [0.0, 1.0]}}))
    dirs = [str(tmp_path / "a"), str(tmp_path / "b")]
    for out_dir in dirs:
        code = main(["experiment", "--spec", str(spec), "--out-dir", out_dir, "--reps", "3",
                     "--seed", "4", "--workers", "1"], environ={})
        assert code == EXIT_OK
    rows = pd.read_csv(os.path.join(dirs[0], "replications.csv"))
    assert len(rows) == 6
    for name in ("replications.csv", "summary.csv", "manifest.json"):
        assert _read(os.path.join(dirs[0], name)) == _read(os.path.join(dirs[1], name))
    with open(os.path.join(dirs[0], "manifest.json")) as f:
        manifest = ujson.load(f)
    assert manifest["seed"] == 4
    assert manifest["spec"]["reps"] == 3


def test_experiment_invalid_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text('{"design": "Nope"}')
    assert main(["experiment", "--spec", str(spec), "--out-dir", str(tmp_path)], environ={}) == EXIT_INVALID
    assert "design" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def test_config_precedence(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.4", "--n", "100", "--seed", "5")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(ujson.dumps({"p": 2, "seed": 8, "method": "classical"}))
    args = build_parser().parse_args(["estimate", "--input", series, "--config", str(cfg), "--p", "1"])
    config = resolve_config(args, environ={"DIFFYW_SEED": "77"})
    assert config.p == 1
    assert config.seed == 8
    assert config.seed_explicit
    assert config.method == "classical"


def test_env_seed(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.4", "--n", "100", "--seed", "5")
    args = build_parser().parse_args(["estimate", "--input", series])
    config = resolve_config(args, environ={"DIFFYW_SEED": "77"})
    assert config.seed == 77
    assert not config.seed_explicit
    with pytest.raises(InvalidInputError):
        resolve_config(args, environ={"DIFFYW_SEED": "abc"})


def test_unknown_config_key(tmp_path):
    series = _simulate(tmp_path, "sim.txt", "--coeffs", "0.4", "--n", "100", "--seed", "5")
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"order": 2}')
    assert main(["estimate", "--input", series, "--config", str(cfg)], environ={}) == EXIT_INVALID


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["estimate", "--p", "two"])
    assert info.value.code == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
