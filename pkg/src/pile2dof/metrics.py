"""Displacement fusion and the normalized peak/RMS error indexes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, UndefinedMetricError
from .series import TimeSeries, add, check_aligned, sma_filter

SCORE_COLUMNS = ("event", "E1_1DOF", "E1_2DOF", "E2_1DOF", "E2_2DOF")


def _scored(est: TimeSeries, meas: TimeSeries):
    check_aligned(est, meas, module="fusion-metrics")
    w = max(est.warmup, meas.warmup)
    n = len(est)
    sl = slice(w, n - w)
    return est.values[sl], meas.values[sl]


def total_displacement(dynamic: TimeSeries, pseudo: TimeSeries) -> TimeSeries:
    return add(dynamic, pseudo, module="fusion-metrics")


def peak_error(est: TimeSeries, meas: TimeSeries, signed: bool = False) -> float:
    """Relative difference of absolute peaks, warmup excluded on both series."""
    e, m = _scored(est, meas)
    if m.size == 0:
        raise UndefinedMetricError("no samples outside warmup", "fusion-metrics")
    ref_peak = np.max(np.abs(m))
    if ref_peak == 0:
        raise UndefinedMetricError("reference peak is zero", "fusion-metrics")
    value = (np.max(np.abs(e)) - ref_peak) / ref_peak
    return float(value if signed else abs(value))


def rms_error(est: TimeSeries, meas: TimeSeries) -> float:
    e, m = _scored(est, meas)
    if m.size == 0:
        raise UndefinedMetricError("no samples outside warmup", "fusion-metrics")
    ref_rms = np.sqrt(np.mean(m**2))
    if ref_rms == 0:
        raise UndefinedMetricError("reference RMS is zero", "fusion-metrics")
    return float(np.sqrt(np.mean((e - m) ** 2)) / ref_rms)


@dataclass(frozen=True)
class ScoreRow:
    """One row of the method comparison; values are fractions, not percent."""

    e1_1dof: float
    e1_2dof: float
    e2_1dof: float
    e2_2dof: float
    event_id: str = ""
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("e2_1dof", "e2_2dof"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")
        for name in ("e1_1dof", "e1_2dof"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_percent(self):
        return tuple(100.0 * v for v in (self.e1_1dof, self.e1_2dof, self.e2_1dof, self.e2_2dof))

    def to_csv_line(self, decimals: int = 1) -> str:
        cells = [f"{v:.{decimals}f}" for v in self.as_percent()]
        return ",".join([self.event_id, *cells])

    @classmethod
    def from_csv_line(cls, line: str) -> ScoreRow:
        parts = [p.strip() for p in line.strip().split(",")]
        if len(parts) != len(SCORE_COLUMNS):
            raise FormatError(f"expected {len(SCORE_COLUMNS)} fields, got {len(parts)}", "fusion-metrics")
        try:
            values = [float(p) / 100.0 for p in parts[1:]]
        except ValueError as exc:
            raise FormatError(f"bad score value in {line!r}: {exc}", "fusion-metrics")
        return cls(*values, event_id=parts[0])


def average_row(rows, event_id="Average value") -> ScoreRow:
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to average")
    cols = np.array([(r.e1_1dof, r.e1_2dof, r.e2_1dof, r.e2_2dof) for r in rows])
    return ScoreRow(*cols.mean(axis=0), event_id=event_id)


@dataclass(frozen=True)
class EstimationResult:
    dynamic: TimeSeries
    pseudo_1dof: TimeSeries
    pseudo_2dof: TimeSeries
    total_1dof: TimeSeries
    total_2dof: TimeSeries
    reference: TimeSeries | None = None
    scores: ScoreRow | None = None
    theta1: TimeSeries | None = None
    theta2: TimeSeries | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        series = [self.dynamic, self.pseudo_1dof, self.pseudo_2dof, self.total_1dof, self.total_2dof]
        if self.reference is not None:
            series.append(self.reference)
        check_aligned(*series, module="fusion-metrics")


def fuse(dynamic, pseudo_1dof, pseudo_2dof, reference=None, **kwargs) -> EstimationResult:
    return EstimationResult(
        dynamic=dynamic,
        pseudo_1dof=pseudo_1dof,
        pseudo_2dof=pseudo_2dof,
        total_1dof=total_displacement(dynamic, pseudo_1dof),
        total_2dof=total_displacement(dynamic, pseudo_2dof),
        reference=reference,
        **kwargs,
    )


def split_reference(reference: TimeSeries, sma_window: int, centered: bool = True):
    """Split a measured displacement into (pseudo-static, dynamic) parts by moving average."""
    pseudo = sma_filter(reference, sma_window, centered=centered)
    dynamic = reference.with_values(reference.values - pseudo.values, warmup=pseudo.warmup)
    return pseudo, dynamic


def compare_methods(
    result: EstimationResult,
    event_id: str = "",
    sma_window: int | None = None,
    signed_e1: bool = False,
    centered: bool = True,
) -> ScoreRow:
    """Score both totals against the reference.

    When ``sma_window`` is given, per-component scores (pseudo-static and
    dynamic against the split reference) are attached as ``extras``.
    """
    ref = result.reference
    if ref is None:
        raise UndefinedMetricError("result has no reference displacement", "fusion-metrics")
    row = dict(
        e1_1dof=peak_error(result.total_1dof, ref, signed=signed_e1),
        e1_2dof=peak_error(result.total_2dof, ref, signed=signed_e1),
        e2_1dof=rms_error(result.total_1dof, ref),
        e2_2dof=rms_error(result.total_2dof, ref),
    )
    extras = {}
    if sma_window is not None:
        ref_pseudo, ref_dyn = split_reference(ref, sma_window, centered=centered)
        for name, est, meas in (
            ("pseudo_1dof", result.pseudo_1dof, ref_pseudo),
            ("pseudo_2dof", result.pseudo_2dof, ref_pseudo),
            ("dynamic", result.dynamic, ref_dyn),
        ):
            try:
                extras[f"e1_{name}"] = peak_error(est, meas, signed=signed_e1)
                extras[f"e2_{name}"] = rms_error(est, meas)
            except UndefinedMetricError:
                continue
    return ScoreRow(**row, event_id=event_id, extras=extras)
