"""Regularized FIR reconstruction of dynamic displacement from acceleration.

The filter is the centre row of the Tikhonov solution operator

    C = (L^T L + lambda^2 I)^-1 L^T L_a,    L = L_a L_c

where ``L_c`` is the (2k+1) x (2k+3) second-difference operator and ``L_a`` a
diagonal weighting of order 2k+1. Applying ``C`` to a window of 2k+1
accelerations and scaling by dt^2 yields the 2k+3 displacements that best
explain them while penalizing displacement energy, which suppresses the
low-frequency drift of plain double integration. An optional final step
removes the residual 0 Hz gain so the output is zero-average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.signal import fftconvolve

from .errors import InvalidArgumentError, NumericError
from .series import TimeSeries, sma_filter

LAMBDA_COEFF = 46.81
LAMBDA_EXPONENT = -1.95
DEFAULT_TARGET_PERIOD = 2.0

WEIGHTINGS = ("identity", "hanning")
WINDOW_COUNTS = ("2k+3", "2k+1")


def _invalid(msg):
    return InvalidArgumentError(msg, "fir-displacement")


def select_k(dt: float, target_period: float = DEFAULT_TARGET_PERIOD) -> int:
    """Smallest half-length whose 2k+3 point window spans two target periods."""
    if dt <= 0 or target_period <= 0:
        raise _invalid("dt and target_period must be positive")
    k = math.ceil((2.0 * target_period / dt - 3.0) / 2.0)
    k = max(k, 1)
    # guard against float round-off at the boundary
    while k > 1 and (2 * (k - 1) + 3) * dt >= 2.0 * target_period:
        k -= 1
    return k


@dataclass(frozen=True)
class FirConfig:
    k: int
    dt: float
    lambda_override: float | None = None
    weighting: str = "identity"
    target_period: float | None = None
    window_count: str = "2k+3"
    zero_dc: bool = True

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise _invalid(f"k must be an integer >= 1, got {self.k}")
        if not self.dt > 0:
            raise _invalid(f"dt must be positive, got {self.dt}")
        if self.lambda_override is not None and not self.lambda_override > 0:
            raise _invalid(f"lambda_override must be positive, got {self.lambda_override}")
        if self.weighting not in WEIGHTINGS:
            raise _invalid(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if self.window_count not in WINDOW_COUNTS:
            raise _invalid(f"window_count must be one of {WINDOW_COUNTS}")

    @classmethod
    def for_period(cls, dt, target_period=DEFAULT_TARGET_PERIOD, **kwargs) -> FirConfig:
        return cls(k=select_k(dt, target_period), dt=dt, target_period=target_period, **kwargs)

    @property
    def window_points(self) -> int:
        return 2 * self.k + 3 if self.window_count == "2k+3" else 2 * self.k + 1


@dataclass(frozen=True, eq=False)
class FirFilter:
    coeffs: np.ndarray
    k: int
    dt: float
    lambda_used: float

    @property
    def dc_gain(self) -> float:
        return float(np.sum(self.coeffs))

    def response(self, freq_hz):
        """Complex displacement-per-acceleration gain (m per m/s^2) at ``freq_hz``."""
        f = np.atleast_1d(np.asarray(freq_hz, dtype=float))
        offsets = np.arange(-self.k, self.k + 1)
        phase = np.exp(1j * 2 * np.pi * np.outer(f, offsets) * self.dt)
        return self.dt**2 * (phase @ self.coeffs)


def second_difference_matrix(k: int) -> np.ndarray:
    if int(k) != k or k < 1:
        raise _invalid(f"k must be an integer >= 1, got {k}")
    k = int(k)
    rows = 2 * k + 1
    mat = np.zeros((rows, rows + 2))
    r = np.arange(rows)
    mat[r, r] = 1.0
    mat[r, r + 1] = -2.0
    mat[r, r + 2] = 1.0
    return mat


def optimal_lambda(n_points: int) -> float:
    """Regularization factor 46.81 * N^-1.95 for an N-point window."""
    if n_points < 3:
        raise _invalid(f"window point count must be >= 3, got {n_points}")
    return LAMBDA_COEFF * float(n_points) ** LAMBDA_EXPONENT


def weighting_diagonal(k: int, kind: str = "identity") -> np.ndarray:
    size = 2 * k + 1
    if kind == "identity":
        return np.ones(size)
    if kind == "hanning":
        # raised cosine without the zero endpoints
        j = np.arange(1, size + 1)
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * j / (size + 1)))
    raise _invalid(f"unknown weighting {kind!r}")


def solution_operator(k: int, lam: float, weighting: str = "identity"):
    """Return ``(C, A, rhs)`` with ``A C = rhs`` for the regularized system."""
    lc = second_difference_matrix(k)
    la = weighting_diagonal(k, weighting)
    big_l = la[:, None] * lc
    a = big_l.T @ big_l + lam**2 * np.eye(2 * k + 3)
    rhs = big_l.T * la[None, :]
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        c = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"regularized normal equations not solvable: {exc}", "fir-displacement")
    if not np.all(np.isfinite(c)):
        raise NumericError("non-finite FIR solution", "fir-displacement")
    return c, a, rhs


def remove_dc(coeffs: np.ndarray) -> np.ndarray:
    """Cancel the 0 Hz gain with a Hann-shaped correction.

    The centre row of the finite-window solution still maps a constant
    acceleration to a constant offset. Subtracting a smooth window (rather
    than the plain mean) keeps the passband untouched because the Hann
    spectrum dies out well below 0.5 Hz for the usual window lengths.
    """
    w = np.hanning(len(coeffs) + 2)[1:-1]
    return coeffs - coeffs.sum() * w / w.sum()


def build_fir(config: FirConfig) -> FirFilter:
    lam = config.lambda_override
    if lam is None:
        lam = optimal_lambda(config.window_points)
    c, _, _ = solution_operator(config.k, lam, config.weighting)
    coeffs = c[config.k + 1].copy()
    if config.zero_dc:
        coeffs = remove_dc(coeffs)
    coeffs.setflags(write=False)
    return FirFilter(coeffs=coeffs, k=config.k, dt=config.dt, lambda_used=lam)


def estimate_dynamic(accel: TimeSeries, fir: FirFilter) -> TimeSeries:
    """Convolve acceleration with the FIR and scale by dt^2.

    The first and last k+1 output samples are zeroed and marked as warmup.
    """
    if abs(accel.dt - fir.dt) > 1e-9 * fir.dt:
        raise _invalid(f"acceleration dt {accel.dt} does not match filter dt {fir.dt}")
    n = len(accel)
    if n < 2 * fir.k + 3:
        raise _invalid(f"input has {n} samples; filter needs at least {2 * fir.k + 3}")
    # output[i] = dt^2 * sum_r c[r] * a[i - k + r]
    kernel = fir.coeffs[::-1]
    if n > 4096:
        out = fftconvolve(accel.values, kernel, mode="same")
    else:
        out = np.convolve(accel.values, kernel, mode="same")
    out = out * fir.dt**2
    edge = fir.k + 1
    out[:edge] = 0.0
    out[n - edge :] = 0.0
    return accel.with_values(out, unit="m", warmup=min(max(edge, accel.warmup), n // 2))


def precondition(accel: TimeSeries, sma_window: int) -> TimeSeries:
    """Remove the slowly varying part (gravity projection of tilt) before filtering."""
    slow = sma_filter(accel, sma_window, centered=True)
    return accel.with_values(accel.values - slow.values)
