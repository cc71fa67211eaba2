import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pile2dof.errors import AlignmentError, FormatError, UndefinedMetricError
from pile2dof.metrics import (
    ScoreRow,
    average_row,
    compare_methods,
    fuse,
    peak_error,
    rms_error,
    total_displacement,
)
from pile2dof.series import TimeSeries

DT = 0.01


def ts(values, warmup=0):
    return TimeSeries(np.asarray(values, dtype=float), DT, unit="m", warmup=warmup)


def test_peak_error_example():
    assert peak_error(ts([0.0, -11.0, 3.0]), ts([0.0, -10.0, 4.0])) == pytest.approx(0.1)


def test_peak_error_sign():
    assert peak_error(ts([9.0]), ts([10.0]), signed=True) == pytest.approx(-0.1)
    assert peak_error(ts([9.0]), ts([10.0])) == pytest.approx(0.1)


def test_rms_error_example():
    meas = ts([1.0, -1.0, 1.0, -1.0])
    est = ts([1.1, -0.9, 1.1, -0.9])
    assert rms_error(est, meas) == pytest.approx(0.1)


def test_perfect_estimate():
    x = ts(np.sin(np.arange(50)))
    assert peak_error(x, x) == 0.0 and rms_error(x, x) == 0.0


def test_zero_reference_is_undefined():
    with pytest.raises(UndefinedMetricError):
        peak_error(ts([1.0, 2.0]), ts([0.0, 0.0]))
    with pytest.raises(UndefinedMetricError):
        rms_error(ts([1.0, 2.0]), ts([0.0, 0.0]))


def test_misaligned_inputs():
    with pytest.raises(AlignmentError):
        rms_error(ts([1.0, 2.0]), ts([1.0, 2.0, 3.0]))
    with pytest.raises(AlignmentError):
        rms_error(ts([1.0, 2.0]), TimeSeries([1.0, 2.0], 0.02))


def test_warmup_excluded_on_both():
    meas = ts([100.0, 1.0, 1.0, -100.0], warmup=1)
    est = ts([0.0, 1.0, 1.0, 0.0])
    assert rms_error(est, meas) == 0.0
    assert peak_error(est, meas) == 0.0


arrays = st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=40)


@given(arrays, arrays, st.floats(1e-3, 1e3))
def test_scale_invariance(a, b, c):
    n = min(len(a), len(b))
    est, meas = np.array(a[:n]), np.array(b[:n])
    if np.sqrt(np.mean(meas**2)) < 1e-6:
        return
    base = rms_error(ts(est), ts(meas))
    assert rms_error(ts(c * est), ts(c * meas)) == pytest.approx(base, rel=1e-9, abs=1e-12)
    pbase = peak_error(ts(est), ts(meas))
    assert peak_error(ts(c * est), ts(c * meas)) == pytest.approx(pbase, rel=1e-9, abs=1e-12)


@given(arrays, arrays, arrays)
def test_rms_triangle_bound(a, b, r):
    n = min(len(a), len(b), len(r))
    a, b, r = (np.array(x[:n]) for x in (a, b, r))
    if np.sqrt(np.mean(r**2)) < 1e-6:
        return
    lhs = rms_error(ts(a + b), ts(r))
    rhs = rms_error(ts(a), ts(r)) + np.sqrt(np.mean(b**2)) / np.sqrt(np.mean(r**2))
    assert lhs <= rhs * (1 + 1e-9) + 1e-12


def test_total_is_sum():
    d, p = ts([1.0, 2.0]), ts([0.5, -0.5])
    np.testing.assert_array_equal(total_displacement(d, p).values, [1.5, 1.5])


def test_compare_with_self_reference():
    t = np.arange(500) * DT
    dyn = ts(0.1 * np.sin(2 * np.pi * 2 * t))
    p1, p2 = ts(np.sin(0.3 * t)), ts(1.1 * np.sin(0.3 * t))
    first = fuse(dyn, p1, p2)
    result = fuse(dyn, p1, p2, reference=first.total_2dof)
    row = compare_methods(result, event_id="x")
    assert row.e1_2dof == 0.0 and row.e2_2dof == 0.0
    assert row.e2_1dof > 0.0


def test_compare_needs_reference():
    result = fuse(ts([1.0]), ts([1.0]), ts([1.0]))
    with pytest.raises(UndefinedMetricError):
        compare_methods(result)


def test_component_extras():
    t = np.arange(2000) * DT
    dyn = ts(0.01 * np.sin(2 * np.pi * 3 * t))
    slow = ts(np.sin(2 * np.pi * 0.02 * t))
    result = fuse(dyn, slow, slow, reference=total_displacement(dyn, slow))
    row = compare_methods(result, sma_window=44)
    assert set(row.extras) >= {"e2_pseudo_1dof", "e2_pseudo_2dof", "e2_dynamic"}
    assert row.extras["e2_pseudo_2dof"] < 0.05


def test_score_line_round_trip():
    line = "train1,16.6,2.4,11.4,3.6"
    row = ScoreRow.from_csv_line(line)
    assert row.event_id == "train1"
    assert row.e2_2dof == pytest.approx(0.036)
    assert row.to_csv_line() == line


def test_score_row_validation():
    with pytest.raises(ValueError):
        ScoreRow(0.1, 0.1, -0.1, 0.1)
    with pytest.raises(ValueError):
        ScoreRow(float("nan"), 0.1, 0.1, 0.1)
    with pytest.raises(FormatError):
        ScoreRow.from_csv_line("train1,1,2,3")
    with pytest.raises(FormatError):
        ScoreRow.from_csv_line("train1,a,2,3,4")


def test_average_row():
    rows = [ScoreRow(0.1, 0.02, 0.1, 0.03), ScoreRow(0.3, 0.04, 0.2, 0.05)]
    avg = average_row(rows)
    assert avg.as_percent() == pytest.approx((20.0, 3.0, 15.0, 4.0))
    assert avg.to_csv_line(decimals=2) == "Average value,20.00,3.00,15.00,4.00"
