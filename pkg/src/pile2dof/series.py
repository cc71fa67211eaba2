"""Uniformly sampled time series and the shared filters built on it."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import AlignmentError, InvalidArgumentError


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Scalar signal sampled every ``dt`` seconds starting at ``t0``.

    ``warmup`` counts the samples at *each* end that a filter could not
    compute from a full window; metrics skip them.
    """

    values: np.ndarray
    dt: float
    t0: float = 0.0
    unit: str = ""
    warmup: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("time series contains non-finite samples", "signal-core")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}", "signal-core")
        warmup = int(self.warmup)
        if warmup < 0 or warmup > len(values) // 2:
            raise InvalidArgumentError(
                f"warmup {warmup} outside [0, {len(values) // 2}]", "signal-core"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "warmup", warmup)

    def __len__(self):
        return len(self.values)

    @property
    def fs(self) -> float:
        return 1.0 / self.dt

    @property
    def time(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))

    @property
    def interior(self) -> np.ndarray:
        """Samples outside the warmup region."""
        n = len(self.values)
        return self.values[self.warmup : n - self.warmup]

    def with_values(self, values, unit=None, warmup=None) -> TimeSeries:
        return replace(
            self,
            values=values,
            unit=self.unit if unit is None else unit,
            warmup=self.warmup if warmup is None else warmup,
        )

    def aligned_with(self, other: TimeSeries) -> bool:
        return self.dt == other.dt and self.t0 == other.t0 and len(self) == len(other)


def check_aligned(*series: TimeSeries, module="signal-core"):
    first = series[0]
    for other in series[1:]:
        if not first.aligned_with(other):
            raise AlignmentError(
                "series not aligned: "
                f"(dt={first.dt}, t0={first.t0}, n={len(first)}) vs "
                f"(dt={other.dt}, t0={other.t0}, n={len(other)})",
                module,
            )


def _clamp_warmup(w, n):
    return min(int(w), n // 2)


def sma_filter(ts: TimeSeries, n: int, centered: bool = True) -> TimeSeries:
    """Simple moving average over ``n`` samples.

    Centered mode averages the ``n`` samples nearest each index (zero phase
    for odd ``n``). Causal mode averages ``x[i], ..., x[i+n-1]``. Windows that
    run off either end are truncated to the available samples, and the
    affected count is folded into ``warmup``.
    """
    length = len(ts)
    if not isinstance(n, (int, np.integer)) or n < 1 or n > length:
        raise InvalidArgumentError(
            f"SMA window n={n} must satisfy 1 <= n <= {length}", "signal-core"
        )
    n = int(n)
    if n == 1:
        return ts.with_values(ts.values)
    if centered:
        before, after = n // 2, (n - 1) // 2
    else:
        before, after = 0, n - 1

    csum = np.concatenate(([0.0], np.cumsum(ts.values)))
    idx = np.arange(length)
    lo = np.maximum(idx - before, 0)
    hi = np.minimum(idx + after + 1, length)
    out = (csum[hi] - csum[lo]) / (hi - lo)

    edge = max(before, after)
    warmup = _clamp_warmup(max(ts.warmup, edge), length)
    return ts.with_values(out, warmup=warmup)


def rms(ts: TimeSeries, exclude_warmup: bool = True) -> float:
    values = ts.interior if exclude_warmup else ts.values
    if values.size == 0:
        raise InvalidArgumentError("rms of an empty sample set", "signal-core")
    return float(np.sqrt(np.mean(values**2)))


def subtract(ts_a: TimeSeries, ts_b: TimeSeries) -> TimeSeries:
    check_aligned(ts_a, ts_b)
    return ts_a.with_values(ts_a.values - ts_b.values, warmup=max(ts_a.warmup, ts_b.warmup))


def add(ts_a: TimeSeries, ts_b: TimeSeries, module="signal-core") -> TimeSeries:
    check_aligned(ts_a, ts_b, module=module)
    return ts_a.with_values(ts_a.values + ts_b.values, warmup=max(ts_a.warmup, ts_b.warmup))
