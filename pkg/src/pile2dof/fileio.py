"""CSV and JSON readers/writers for events, displacements and score tables.

All numbers are written with 9 significant digits, SI units throughout
(scores are the exception: percent). Writes go to a temporary file in the
target directory and are renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .beam import PileGeometry
from .errors import FormatError
from .inclination import ChannelPair
from .metrics import SCORE_COLUMNS, EstimationResult, ScoreRow
from .series import TimeSeries
from .synth import DEFAULT_GEOMETRY, SensorEventRecord

EVENT_COLUMNS = ("time", "ax_top", "ay_top", "ax_bot", "ay_bot")
DISPLACEMENT_COLUMNS = ("time", "dyn", "pseudo_1dof", "pseudo_2dof", "total_1dof", "total_2dof")
STEP_RTOL = 1e-6
FLOAT_FMT = "{:.9g}"


def fmt(x) -> str:
    return FLOAT_FMT.format(float(x))


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table_text(header, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _read_table(path, required, optional=()):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise FormatError(f"{path}: empty file", "io-cli")
            rows = [r for r in reader if r]
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}", "io-cli")
    missing = [c for c in required if c not in header]
    if missing:
        raise FormatError(f"{path}: missing required column(s) {', '.join(missing)}", "io-cli")
    wanted = [c for c in (*required, *optional) if c in header]
    cols = {c: [] for c in wanted}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise FormatError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}", "io-cli")
        for c in wanted:
            try:
                cols[c].append(float(row[header.index(c)]))
            except ValueError:
                raise FormatError(f"{path}: row {lineno} column {c!r} is not a number", "io-cli")
    out = {c: np.asarray(v, dtype=float) for c, v in cols.items()}
    for c, v in out.items():
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0]) + 2
            raise FormatError(f"{path}: non-finite value in column {c!r} at row {bad}", "io-cli")
    return out


def infer_clock(path, time: np.ndarray):
    """Return ``(t0, dt)`` for a uniformly stepped time column.

    The step is checked sample by sample against ``t0 + i*dt`` with a
    tolerance of 1e-6 relative to the time stamp (or the step, if larger),
    which absorbs 9-significant-digit rounding. A step within 1e-6 of an
    integer sample rate is snapped to it.
    """
    if time.size < 2:
        raise FormatError(f"{path}: need at least 2 rows to infer the sample interval", "io-cli")
    steps = np.diff(time)
    if np.any(steps <= 0):
        row = int(np.flatnonzero(steps <= 0)[0]) + 3
        raise FormatError(f"{path}: time not strictly increasing at row {row}", "io-cli")
    t0 = float(time[0])
    dt = float((time[-1] - time[0]) / (time.size - 1))
    fs = 1.0 / dt
    if abs(fs - round(fs)) <= STEP_RTOL * fs:
        dt = 1.0 / round(fs)
    expected = t0 + dt * np.arange(time.size)
    tol = STEP_RTOL * np.maximum(np.abs(time), dt)
    bad = np.flatnonzero(np.abs(time - expected) > tol)
    if bad.size:
        row = int(bad[0]) + 2
        raise FormatError(f"{path}: non-uniform time step at row {row}", "io-cli")
    return t0, dt


def write_event(record: SensorEventRecord, path):
    t = record.time
    cols = [t, record.top.ax.values, record.top.ay.values, record.bottom.ax.values, record.bottom.ay.values]
    header = list(EVENT_COLUMNS)
    if record.reference is not None:
        header.append("lvdt")
        cols.append(record.reference.values)
    atomic_write_text(path, _table_text(header, cols))


def read_event(path, geometry: PileGeometry | None = None) -> SensorEventRecord:
    cols = _read_table(path, EVENT_COLUMNS, optional=("lvdt",))
    t0, dt = infer_clock(path, cols["time"])

    def ts(name, unit):
        return TimeSeries(cols[name], dt, t0=t0, unit=unit)

    reference = ts("lvdt", "m") if "lvdt" in cols else None
    return SensorEventRecord(
        top=ChannelPair(ts("ax_top", "m/s^2"), ts("ay_top", "m/s^2"), "top"),
        bottom=ChannelPair(ts("ax_bot", "m/s^2"), ts("ay_bot", "m/s^2"), "bottom"),
        geometry=geometry or DEFAULT_GEOMETRY,
        reference=reference,
        meta={"source": str(path)},
    )


def write_displacements(result: EstimationResult, path):
    header = list(DISPLACEMENT_COLUMNS)
    cols = [
        result.dynamic.time,
        result.dynamic.values,
        result.pseudo_1dof.values,
        result.pseudo_2dof.values,
        result.total_1dof.values,
        result.total_2dof.values,
    ]
    if result.reference is not None:
        header.append("reference")
        cols.append(result.reference.values)
    atomic_write_text(path, _table_text(header, cols))


def read_displacements(path, warmup: int = 0) -> dict[str, TimeSeries]:
    """Read any displacement CSV with a time column; every other column becomes a series."""
    try:
        with open(path, newline="") as fh:
            header = [h.strip() for h in next(csv.reader(fh))]
    except (OSError, StopIteration) as exc:
        raise FormatError(f"cannot read header of {path}: {exc}", "io-cli")
    if "time" not in header:
        raise FormatError(f"{path}: missing required column time", "io-cli")
    names = [h for h in header if h != "time"]
    if not names:
        raise FormatError(f"{path}: no displacement columns", "io-cli")
    cols = _read_table(path, ("time",), optional=names)
    t0, dt = infer_clock(path, cols["time"])
    n = cols["time"].size
    return {c: TimeSeries(cols[c], dt, t0=t0, unit="m", warmup=min(warmup, n // 2)) for c in names}


def scores_text(rows, average: ScoreRow | None = None, failures=()) -> str:
    lines = [",".join(SCORE_COLUMNS)]
    lines += [r.to_csv_line(decimals=1) for r in rows]
    lines += [f"{eid},FAILED,FAILED,FAILED,FAILED" for eid in failures]
    if average is not None:
        lines.append(average.to_csv_line(decimals=2))
    return "\n".join(lines) + "\n"


def write_scores(path, rows, average: ScoreRow | None = None, failures=()):
    atomic_write_text(path, scores_text(rows, average, failures))


def read_scores(path) -> list[ScoreRow]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}", "io-cli")
    if not lines or [c.strip() for c in lines[0].split(",")] != list(SCORE_COLUMNS):
        raise FormatError(f"{path}: header must be {','.join(SCORE_COLUMNS)}", "io-cli")
    return [ScoreRow.from_csv_line(line) for line in lines[1:] if line.strip() and "FAILED" not in line]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, data: dict):
    atomic_write_text(path, json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
