"""Command-line interface: simulate, estimate, compare, bench, lambda.

Exit codes: 0 success, 2 usage or format error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import (
    FormatError,
    InvalidArgumentError,
    ModelViolationError,
    NumericError,
    Pile2dofError,
    UndefinedMetricError,
)
from .fileio import (
    atomic_write_text,
    read_displacements,
    read_event,
    write_displacements,
    write_event,
    write_json,
    write_scores,
)
from .fir import optimal_lambda
from .metrics import ScoreRow, average_row, peak_error, rms_error
from .synth import (
    DynamicSpec,
    PseudoProfile,
    TrainEventSpec,
    builtin_catalog,
    builtin_ids,
    builtin_spec,
    generate_event,
    run_pipeline,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _load_config(args) -> RunConfig:
    overrides = {}
    if getattr(args, "out_dir", None) is not None:
        overrides["out_dir"] = args.out_dir
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "strict_paper", False):
        overrides["strict_paper"] = True
    if getattr(args, "jobs", None) is not None:
        overrides["jobs"] = args.jobs
    return RunConfig.load(args.config, **overrides)


def _load_spec(arg: str, cfg: RunConfig) -> TrainEventSpec:
    if arg in builtin_ids():
        return cfg.apply_to_spec(builtin_spec(arg, base_seed=cfg.seed))
    path = Path(arg)
    if not path.suffix == ".json" or not path.exists():
        raise InvalidArgumentError(
            f"unknown event {arg!r}; use a spec JSON file or one of: {', '.join(builtin_ids())}",
            "io-cli",
        )
    try:
        data = json.loads(path.read_text())
        data["pseudo_profile"] = PseudoProfile(**data.get("pseudo_profile", {}))
        data["dynamic"] = DynamicSpec(**data.get("dynamic", {}))
        if "seed" not in data:
            data["seed"] = cfg.seed
        return TrainEventSpec(**data)
    except (json.JSONDecodeError, TypeError) as exc:
        raise FormatError(f"bad event spec {path}: {exc}", "io-cli")


def _simulate_one(spec: TrainEventSpec, cfg: RunConfig):
    return generate_event(
        spec,
        geom=cfg.geometry(),
        section=cfg.section(),
        fs=cfg.sample_rate_hz,
        g=cfg.g,
        fixed_base=cfg.fixed_base,
        bottom_inertia=cfg.bottom_inertia,
    )


def _estimate(record, cfg: RunConfig, event_id=""):
    return run_pipeline(
        record,
        fir_cfg=cfg.fir(record.dt),
        incl_cfg=cfg.inclination(),
        strict_paper=cfg.strict_paper,
        event_id=event_id,
    )


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    spec = _load_spec(args.event, cfg)
    record = _simulate_one(spec, cfg)
    out = Path(cfg.out_dir)
    write_event(record, out / "event.csv")
    meta = dict(record.meta)
    meta["config"] = cfg.to_dict()
    write_json(out / "event.meta.json", meta)
    print(f"wrote {out / 'event.csv'} ({len(record.top.ax)} samples at {record.sample_rate_hz:g} Hz)")
    return EXIT_OK


def _summary_lines(result, event_path) -> list[str]:
    lines = [
        f"event: {event_path}",
        f"samples: {len(result.dynamic)}",
        f"sample interval (s): {result.dynamic.dt:.9g}",
        f"warmup samples per end: {result.total_2dof.warmup}",
        f"FIR half-length k: {result.meta.get('fir_k')}",
        f"FIR regularization: {result.meta.get('fir_lambda'):.9g}",
        f"tilt moving-average window: {result.meta.get('sma_window')}",
        f"opposite-sign rotation samples: {result.meta.get('opposite_sign_samples')}",
    ]
    for name in ("total_1dof", "total_2dof"):
        ts = getattr(result, name)
        peak = np.max(np.abs(ts.interior)) if ts.interior.size else 0.0
        lines.append(f"{name} peak |displacement| (m): {peak:.9g}")
    if result.scores is None:
        lines.append("no reference: scores not computed")
    else:
        e11, e12, e21, e22 = result.scores.as_percent()
        lines.append(f"E1 1DOF / 2DOF (%): {e11:.2f} / {e12:.2f}")
        lines.append(f"E2 1DOF / 2DOF (%): {e21:.2f} / {e22:.2f}")
    return lines


def cmd_estimate(args) -> int:
    cfg = _load_config(args)
    record = read_event(args.event, geometry=cfg.geometry())
    event_id = Path(args.event).stem
    result = _estimate(record, cfg, event_id=event_id)
    out = Path(cfg.out_dir)
    write_displacements(result, out / "displacements.csv")
    scores_path = out / "scores.csv"
    if result.scores is not None:
        write_scores(scores_path, [result.scores])
    elif scores_path.exists():
        scores_path.unlink()
    atomic_write_text(out / "summary.txt", "\n".join(_summary_lines(result, args.event)) + "\n")
    print(f"wrote {out / 'displacements.csv'}")
    return EXIT_OK


def _pick_reference(cols: dict, path):
    for name in ("reference", "lvdt"):
        if name in cols:
            return cols[name]
    if len(cols) == 1:
        return next(iter(cols.values()))
    raise FormatError(f"{path}: cannot tell which column is the reference", "io-cli")


def cmd_compare(args) -> int:
    cfg = _load_config(args)
    est = read_displacements(args.estimate, warmup=args.warmup)
    ref = _pick_reference(read_displacements(args.reference, warmup=args.warmup), args.reference)
    signed = cfg.strict_paper
    event_id = Path(args.estimate).stem
    out = Path(cfg.out_dir)
    if "total_1dof" in est and "total_2dof" in est:
        row = ScoreRow(
            e1_1dof=peak_error(est["total_1dof"], ref, signed=signed),
            e1_2dof=peak_error(est["total_2dof"], ref, signed=signed),
            e2_1dof=rms_error(est["total_1dof"], ref),
            e2_2dof=rms_error(est["total_2dof"], ref),
            event_id=event_id,
        )
        write_scores(out / "scores.csv", [row])
        print(row.to_csv_line())
        return EXIT_OK
    names = [c for c in est if c not in ("reference", "lvdt")]
    if len(names) != 1:
        raise FormatError(
            f"{args.estimate}: expected total_1dof/total_2dof or a single estimate column", "io-cli"
        )
    series = est[names[0]]
    e1 = peak_error(series, ref, signed=signed)
    e2 = rms_error(series, ref)
    text = f"estimate,E1,E2\n{names[0]},{100 * e1:.1f},{100 * e2:.1f}\n"
    atomic_write_text(out / "scores.csv", text)
    print(text, end="")
    return EXIT_OK


def _bench_event(spec: TrainEventSpec, cfg: RunConfig):
    record = _simulate_one(spec, cfg)
    return _estimate(record, cfg, event_id=spec.event_id).scores


def run_bench(cfg: RunConfig):
    """Score every builtin event; returns ``(rows, failures)`` in catalog order."""
    specs = [cfg.apply_to_spec(s) for s in builtin_catalog(base_seed=cfg.seed)]
    outcomes = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_bench_event, s, cfg) for s in specs]
            for spec, fut in zip(specs, futures):
                try:
                    outcomes.append((spec.event_id, fut.result(), None))
                except Pile2dofError as exc:
                    outcomes.append((spec.event_id, None, exc))
    else:
        for spec in specs:
            try:
                outcomes.append((spec.event_id, _bench_event(spec, cfg), None))
            except Pile2dofError as exc:
                outcomes.append((spec.event_id, None, exc))
    rows = [row for _, row, _ in outcomes if row is not None]
    failures = [(eid, exc) for eid, _, exc in outcomes if exc is not None]
    return rows, failures


def bench_summary(rows, failures, cfg: RunConfig) -> str:
    lines = [f"events scored: {len(rows)}", f"events failed: {len(failures)}"]
    for eid, exc in failures:
        lines.append(f"  {eid}: [{exc.module}] {exc}")
    if rows:
        avg = average_row(rows)
        e11, e12, e21, e22 = avg.as_percent()
        lines += [
            f"average E1 1DOF / 2DOF (%): {e11:.2f} / {e12:.2f}",
            f"average E2 1DOF / 2DOF (%): {e21:.2f} / {e22:.2f}",
        ]
        if e11 > 0:
            lines.append(f"average E1 reduction by 2DOF (%): {100 * (1 - e12 / e11):.1f}")
        if e21 > 0:
            lines.append(f"average E2 reduction by 2DOF (%): {100 * (1 - e22 / e21):.1f}")
        better = sum(r.e2_2dof < r.e2_1dof for r in rows)
        lines.append(f"events with E2 2DOF < E2 1DOF: {better} of {len(rows)}")
    lines.append("config: " + json.dumps(cfg.to_dict(), sort_keys=True))
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    rows, failures = run_bench(cfg)
    out = Path(cfg.out_dir)
    average = average_row(rows) if rows else None
    write_scores(out / "bench_report.csv", rows, average, failures=[eid for eid, _ in failures])
    summary = bench_summary(rows, failures, cfg)
    atomic_write_text(out / "bench_summary.txt", summary)
    print(summary, end="")
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_lambda(args) -> int:
    print(f"{optimal_lambda(args.n):.9g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pile2dof",
        description="Reference-free pile displacement from two-axis accelerometers (1DOF vs 2DOF).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON run configuration")
    common.add_argument("--out-dir", help="directory for output files (default: config out_dir)")
    common.add_argument("--seed", type=int, help="base random seed for synthetic events")
    common.add_argument(
        "--strict-paper",
        action="store_true",
        help="forward moving average, raw acceleration into the FIR, signed peak error",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic event CSV")
    p.add_argument("event", help=f"builtin id ({builtin_ids()[0]}..{builtin_ids()[-1]}) or spec JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="estimate displacements from an event CSV")
    p.add_argument("event", help="event CSV (time,ax_top,ay_top,ax_bot,ay_bot[,lvdt])")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("compare", parents=[common], help="score estimated against reference displacements")
    p.add_argument("estimate", help="displacement CSV with total_1dof/total_2dof or one estimate column")
    p.add_argument("reference", help="displacement CSV with a reference/lvdt column or a single column")
    p.add_argument("--warmup", type=int, default=0, help="samples to skip at each end")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", parents=[common], help="run the ten builtin events and tabulate scores")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lambda", help="print the optimal regularization factor for N window points")
    p.add_argument("n", type=int, help="window point count N (>= 3)")
    p.set_defaults(func=cmd_lambda)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NumericError, UndefinedMetricError, ModelViolationError) as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Pile2dofError as exc:
        # format, alignment and argument errors are input problems
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
