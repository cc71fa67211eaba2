"""Tilt angles from two-axis accelerometer readings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UndefinedOrientationError
from .series import TimeSeries, check_aligned, sma_filter

STANDARD_GRAVITY = 9.80665
DEFAULT_CUTOFF_HZ = 0.5
# -3 dB point of an n-point moving average sits at ~0.443 * fs / n
SMA_HALF_POWER = 0.443


@dataclass(frozen=True)
class ChannelPair:
    """Axis ``ax`` along the motion, ``ay`` along gravity when level."""

    ax: TimeSeries
    ay: TimeSeries
    location: str = "top"

    def __post_init__(self):
        check_aligned(self.ax, self.ay, module="inclination")


@dataclass(frozen=True)
class InclinationConfig:
    g: float = STANDARD_GRAVITY
    cutoff_hz: float = DEFAULT_CUTOFF_HZ
    centered: bool = True

    def __post_init__(self):
        if not self.g > 0:
            raise InvalidArgumentError(f"g must be positive, got {self.g}", "inclination")
        if not self.cutoff_hz > 0:
            raise InvalidArgumentError(
                f"cutoff_hz must be positive, got {self.cutoff_hz}", "inclination"
            )

    def sma_window(self, sample_rate_hz: float) -> int:
        if self.cutoff_hz >= 0.5 * sample_rate_hz:
            raise InvalidArgumentError(
                f"cutoff {self.cutoff_hz} Hz must lie below Nyquist ({0.5 * sample_rate_hz} Hz)",
                "inclination",
            )
        return max(1, int(round(SMA_HALF_POWER * sample_rate_hz / self.cutoff_hz)))


def angle_from_axes(ax, ay):
    """Inclination ``arctan(ax / ay)`` in radians.

    Uses the two-argument arctangent so the result is independent of any
    common scale on the two readings. Accepts scalars or arrays.
    """
    ax = np.asarray(ax, dtype=float)
    ay = np.asarray(ay, dtype=float)
    both_zero = (ax == 0) & (ay == 0)
    if np.any(both_zero):
        raise UndefinedOrientationError("both axes read zero; orientation undefined", "inclination")
    theta = np.arctan2(ax, ay)
    # fold into (-pi/2, pi/2] so an inverted sensor reads as a tilt, not a flip
    theta = np.where(theta > math.pi / 2, theta - math.pi, theta)
    theta = np.where(theta <= -math.pi / 2, theta + math.pi, theta)
    return float(theta) if theta.ndim == 0 else theta


def angle_series(pair: ChannelPair) -> TimeSeries:
    ax, ay = pair.ax.values, pair.ay.values
    bad = np.flatnonzero((ax == 0) & (ay == 0))
    if bad.size:
        raise UndefinedOrientationError(
            f"{pair.location} sensor: both axes zero at sample {int(bad[0])}", "inclination"
        )
    theta = angle_from_axes(ax, ay)
    return pair.ax.with_values(theta, unit="rad")


def pseudo_static_angle(theta_t: TimeSeries, cfg: InclinationConfig) -> TimeSeries:
    """Low-pass the total angle with a moving average whose -3 dB point is ``cfg.cutoff_hz``."""
    n = cfg.sma_window(theta_t.fs)
    if n > len(theta_t):
        raise InvalidArgumentError(
            f"SMA window of {n} samples exceeds record length {len(theta_t)}; "
            "raise cutoff_hz or supply a longer record",
            "inclination",
        )
    return sma_filter(theta_t, n, centered=cfg.centered)


def required_resolution(n_angle: float, p_angle: float, g: float = STANDARD_GRAVITY) -> float:
    """Smallest acceleration step (m/s^2) that resolves ``p_angle`` at tilt ``n_angle``."""
    if not p_angle > 0:
        raise InvalidArgumentError(f"p_angle must be positive, got {p_angle}", "inclination")
    return g * (math.sin(n_angle + p_angle) - math.sin(n_angle))
