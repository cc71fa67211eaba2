import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pile2dof.errors import InvalidArgumentError
from pile2dof.fir import (
    FirConfig,
    build_fir,
    estimate_dynamic,
    optimal_lambda,
    second_difference_matrix,
    select_k,
    solution_operator,
)
from pile2dof.series import TimeSeries, rms

FS = 256.0
DT = 1.0 / FS


def fitted_amplitude(t, y, omega):
    """Least-squares amplitude of a sinusoid at ``omega`` in ``y`` (brute-force oracle)."""
    basis = np.column_stack([np.sin(omega * t), np.cos(omega * t)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(np.hypot(*coef))


def test_second_difference_k1():
    expected = np.array(
        [[1, -2, 1, 0, 0], [0, 1, -2, 1, 0], [0, 0, 1, -2, 1]], dtype=float
    )
    np.testing.assert_array_equal(second_difference_matrix(1), expected)


@pytest.mark.parametrize("k", [1, 4, 30])
def test_second_difference_rows_sum_to_zero(k):
    mat = second_difference_matrix(k)
    assert mat.shape == (2 * k + 1, 2 * k + 3)
    assert np.all(mat.sum(axis=1) == 0)


def test_second_difference_of_parabola():
    k, dt = 6, 0.01
    t = np.arange(2 * k + 3) * dt
    np.testing.assert_allclose(second_difference_matrix(k) @ t**2 / dt**2, 2.0, rtol=1e-9)


def test_second_difference_rejects_k0():
    with pytest.raises(InvalidArgumentError):
        second_difference_matrix(0)


def test_optimal_lambda_values():
    assert optimal_lambda(100) == pytest.approx(5.893e-3, abs=1e-6)
    assert optimal_lambda(33) == pytest.approx(5.124e-2, abs=1e-4)
    with pytest.raises(InvalidArgumentError):
        optimal_lambda(2)


@given(st.integers(3, 10_000), st.integers(1, 10_000))
def test_optimal_lambda_decreasing(n1, step):
    assert optimal_lambda(n1) > optimal_lambda(n1 + step)


def test_select_k_spans_two_periods():
    k = select_k(DT, 2.0)
    assert (2 * k + 3) * DT >= 4.0
    assert (2 * (k - 1) + 3) * DT < 4.0


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        FirConfig(k=0, dt=DT)
    with pytest.raises(InvalidArgumentError):
        FirConfig(k=3, dt=-1.0)
    with pytest.raises(InvalidArgumentError):
        FirConfig(k=3, dt=DT, lambda_override=0.0)
    with pytest.raises(InvalidArgumentError):
        FirConfig(k=3, dt=DT, weighting="triangle")


def test_default_lambda_uses_2k_plus_3_points():
    fir = build_fir(FirConfig(k=15, dt=DT))
    assert fir.lambda_used == optimal_lambda(33)
    alt = build_fir(FirConfig(k=15, dt=DT, window_count="2k+1"))
    assert alt.lambda_used == optimal_lambda(31)
    assert build_fir(FirConfig(k=15, dt=DT, lambda_override=0.1)).lambda_used == 0.1


@pytest.mark.parametrize("k", [5, 15, 50])
@pytest.mark.parametrize("weighting", ["identity", "hanning"])
def test_coefficients_symmetric(k, weighting):
    c = build_fir(FirConfig(k=k, dt=DT, weighting=weighting)).coeffs
    assert c.shape == (2 * k + 1,)
    assert np.max(np.abs(c - c[::-1])) <= 1e-10 * np.max(np.abs(c))


@pytest.mark.parametrize("k", [15, 100])
def test_dc_gain_suppressed(k):
    c = build_fir(FirConfig(k=k, dt=DT)).coeffs
    assert abs(c.sum()) < 1e-3 * np.max(np.abs(c))


def test_uncorrected_centre_row_leaks_dc():
    # the bare regularized solution maps a constant to a constant offset
    c = build_fir(FirConfig(k=15, dt=DT, zero_dc=False)).coeffs
    assert abs(c.sum()) > 1.0 * np.max(np.abs(c))


@pytest.mark.parametrize("k", [3, 20, 120])
def test_solver_self_check(k):
    lam = optimal_lambda(2 * k + 3)
    c, a, rhs = solution_operator(k, lam)
    np.testing.assert_allclose(a, a.T)
    assert np.all(np.linalg.eigvalsh(a) > 0)
    np.testing.assert_allclose(a @ c, rhs, rtol=0, atol=1e-8 * np.max(np.abs(rhs)))


@pytest.mark.parametrize("freq", [1.0, 2.0, 5.0])
def test_response_matches_double_integration(default_fir, freq):
    omega = 2 * np.pi * freq
    gain = default_fir.response(freq)[0]
    assert abs(gain.imag) < 1e-6 * abs(gain.real)
    assert abs(gain) == pytest.approx(1 / omega**2, rel=0.05)


def test_response_agrees_with_brute_force_filtering(default_fir):
    freq = 2.0
    omega = 2 * np.pi * freq
    t = np.arange(int(20 * FS)) * DT
    out = estimate_dynamic(TimeSeries(np.sin(omega * t), DT), default_fir)
    w = out.warmup
    measured = fitted_amplitude(t[w:-w], out.values[w:-w], omega)
    assert measured == pytest.approx(abs(default_fir.response(freq)[0]), rel=1e-6)


def test_zero_acceleration_gives_zero(default_fir):
    out = estimate_dynamic(TimeSeries(np.zeros(3000), DT), default_fir)
    assert np.all(out.values == 0)
    assert out.unit == "m"


def test_sinusoid_reconstruction(default_fir):
    amp, omega = 5e-3, 2 * np.pi * 2.0
    t = np.arange(int(12 * FS)) * DT
    accel = TimeSeries(-(omega**2) * amp * np.sin(omega * t), DT)
    out = estimate_dynamic(accel, default_fir)
    assert out.warmup == default_fir.k + 1
    assert np.all(out.values[: out.warmup] == 0) and np.all(out.values[-out.warmup :] == 0)
    truth = amp * np.sin(omega * t)
    w = out.warmup
    assert np.max(np.abs(out.values[w:-w] - truth[w:-w])) < 0.05 * amp


def test_dc_bias_suppressed(default_fir):
    bias, period = 0.2, 2.0
    out = estimate_dynamic(TimeSeries(np.full(4000, bias), DT), default_fir)
    assert rms(out) < 1e-3 * bias * period**2


def test_zero_average_on_stationary_input(default_fir):
    n = int(60 * FS)
    t = np.arange(n) * DT
    span = (n - 2 * (default_fir.k + 1)) * DT
    # whole cycles over the scored region plus a gravity-like offset
    freqs = np.array([40, 90, 170]) / span
    accel = 0.3 + np.sin(2 * np.pi * np.outer(t, freqs)) @ np.array([1.0, 0.5, 0.25])
    out = estimate_dynamic(TimeSeries(accel, DT), default_fir)
    assert abs(np.mean(out.interior)) < 1e-3 * rms(out)


def test_linearity(default_fir, rng):
    x, y = rng.normal(size=5000), rng.normal(size=5000)
    e = lambda v: estimate_dynamic(TimeSeries(v, DT), default_fir).values
    np.testing.assert_allclose(e(2.5 * x - 0.7 * y), 2.5 * e(x) - 0.7 * e(y), atol=1e-10)


def test_time_shift_equivariance(rng):
    fir = build_fir(FirConfig(k=20, dt=DT))
    x = rng.normal(size=600)
    shift = 37
    a = estimate_dynamic(TimeSeries(x, DT), fir).values
    b = estimate_dynamic(TimeSeries(np.roll(x, shift), DT), fir).values
    lo, hi = fir.k + 1 + shift, 600 - fir.k - 1
    np.testing.assert_allclose(b[lo:hi], a[lo - shift : hi - shift], atol=1e-12)


def test_dt_mismatch_and_short_input(default_fir):
    with pytest.raises(InvalidArgumentError):
        estimate_dynamic(TimeSeries(np.zeros(5000), 0.01), default_fir)
    with pytest.raises(InvalidArgumentError):
        estimate_dynamic(TimeSeries(np.zeros(2 * default_fir.k + 2), DT), default_fir)
