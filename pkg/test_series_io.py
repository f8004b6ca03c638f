#!/usr/bin/env python3
"""
Tests for series_io.py
"""

import os
import sys

import numpy as np
import pytest
import ujson

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from armodel import ARModel, ChangepointConfig, simulate_ar
from decorrelate import decorrelate
from series_io import (
    SeriesParseError,
    dumps_report,
    read_series,
    read_truth_sidecar,
    truth_path,
    write_residuals,
    write_series,
    write_truth_sidecar,
)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# Reading series
# ---------------------------------------------------------------------------

def test_comments_and_blank_lines_skipped(tmp_path):
    path = _write(tmp_path, "s.txt", "# station 42\n1.5\n\n2\n  # mid-file note\n3e0\n")
    np.testing.assert_array_equal(read_series(path), [1.5, 2.0, 3.0])


def test_bad_value_names_line(tmp_path):
    path = _write(tmp_path, "s.txt", "1\n# note\nabc\n4\n")
    with pytest.raises(SeriesParseError, match=r"s\.txt:3:") as info:
        read_series(path)
    assert info.value.line == 3


def test_non_finite_value_rejected(tmp_path):
    path = _write(tmp_path, "s.txt", "1\n2\ninf\n")
    with pytest.raises(SeriesParseError) as info:
        read_series(path)
    assert info.value.line == 3


def test_ragged_lines_rejected(tmp_path):
    path = _write(tmp_path, "s.txt", "1\n2,3\n")
    with pytest.raises(SeriesParseError) as info:
        read_series(path)
    assert info.value.line == 2


def test_multi_field_needs_column(tmp_path):
    path = _write(tmp_path, "s.csv", "1,2\n3,4\n")
    with pytest.raises(SeriesParseError, match="name a column"):
        read_series(path)


def test_empty_file(tmp_path):
    path = _write(tmp_path, "s.txt", "# nothing here\n\n")
    with pytest.raises(SeriesParseError, match="no numeric values"):
        read_series(path)


def test_missing_file(tmp_path):
    with pytest.raises(SeriesParseError):
        read_series(str(tmp_path / "absent.txt"))


def test_column_and_ratio(tmp_path):
    path = _write(tmp_path, "p.csv", "year,new_bedford,boston\n1900,2.0,4.0\n1901,3.0,6.0\n1902,1.0,8.0\n")
    np.testing.assert_array_equal(read_series(path, "new_bedford"), [2.0, 3.0, 1.0])
    np.testing.assert_array_equal(read_series(path, "new_bedford", "boston"), [0.5, 0.5, 0.125])
    with pytest.raises(SeriesParseError, match="not found"):
        read_series(path, "providence")
    with pytest.raises(SeriesParseError):
        read_series(path, denominator_column="boston")


def test_zero_denominator(tmp_path):
    path = _write(tmp_path, "p.csv", "a,b\n1,2\n3,0\n")
    with pytest.raises(SeriesParseError) as info:
        read_series(path, "a", "b")
    assert info.value.line == 3


def test_write_series_with_header(tmp_path):
    path = str(tmp_path / "out.txt")
    values = simulate_ar(ARModel([0.3]), 50, seed=1)
    write_series(path, values, ["generated"])
    with open(path) as f:
        assert f.readline() == "# generated\n"
    np.testing.assert_allclose(read_series(path), values, rtol=1e-15)


# ---------------------------------------------------------------------------
# Reports, sidecars, residual files
# ---------------------------------------------------------------------------

def test_dumps_report_is_plain_json():
    text = dumps_report({"b": np.float64(0.5), "a": np.arange(3), "c": float("nan"), "d": np.bool_(True)})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert ujson.loads(text) == {"a": [0, 1, 2], "b": 0.5, "c": None, "d": True}


def test_truth_sidecar_round_trip(tmp_path):
    series_path = str(tmp_path / "sim.txt")
    model = ARModel([0.5, 0.2], noise_var=2.0)
    config = ChangepointConfig([10, 60], [0.0, 1.5, -0.5])
    written = write_truth_sidecar(series_path, model, config, seed=7, n=100, burnin=520)
    assert written == truth_path(series_path)
    loaded_model, loaded_config, meta = read_truth_sidecar(written)
    np.testing.assert_array_equal(loaded_model.coeffs, model.coeffs)
    assert loaded_model.noise_var == 2.0
    assert loaded_config.times.tolist() == [10, 60]
    assert loaded_config.means.tolist() == [0.0, 1.5, -0.5]
    assert meta["seed"] == 7 and meta["n"] == 100 and meta["burnin"] == 520


def test_malformed_sidecar(tmp_path):
    path = _write(tmp_path, "bad.truth.json", '{"model": {"coeffs": [1.0], "noise_var": 1.0}}')
    with pytest.raises(SeriesParseError, match="malformed"):
        read_truth_sidecar(path)
    with pytest.raises(SeriesParseError, match="not found"):
        read_truth_sidecar(str(tmp_path / "missing.truth.json"))


def test_residual_file_round_trip(tmp_path):
    x = simulate_ar(ARModel([0.6]), 300, seed=2)
    report, residuals = decorrelate(x, 1)
    path = str(tmp_path / "resid.txt")
    write_residuals(path, residuals, report)
    with open(path) as f:
        header = [line for line in f if line.startswith("#")]
    assert any(line.startswith("# offset: 1") for line in header)
    np.testing.assert_allclose(read_series(path), residuals.values, rtol=1e-14, atol=1e-15)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
