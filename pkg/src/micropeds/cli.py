"""Command-line entry point.

Exit status: 0 on success, 1 for invalid input (bad flags, unreadable or
invalid files), 2 when a simulation aborts on a non-finite quantity.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import metrics as M
from .calibrate import calibrate
from .engine import SimulationState, run
from .errors import SimulationAborted, ValidationError
from .scene import MODELS, Scenario
from .scenario_file import load_scenario, with_overrides
from .trajectory import read_trajectory, write_trajectory

log = logging.getLogger("micropeds")

EXIT_OK, EXIT_INVALID, EXIT_ABORT = 0, 1, 2
MOVEMENT = {"cellular": "discrete", "magnetic": "continuous", "social": "continuous"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="micropeds", description="Microscopic pedestrian simulation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one scenario and write its trajectory")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="trajectory CSV to write")
    p.add_argument("--seed", type=int)
    p.add_argument("--model", choices=MODELS, help="override the scenario's model")
    p.add_argument("--allow-unknown", action="store_true", help="ignore unknown scenario keys")
    p.add_argument("--progress", type=int, default=0, metavar="N", help="log progress every N steps")

    p = sub.add_parser("compare", help="run all three models on one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--allow-unknown", action="store_true")

    p = sub.add_parser("metrics", help="measure a trajectory file")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--region", required=True, action="append",
                   help="area:xmin,ymin,xmax,ymax or gate:x0,y0,x1,y1 (repeatable)")
    p.add_argument("--time", type=float, help="instant for density and queue")
    p.add_argument("--window", type=float, help="gate counting window in s (default: whole span)")
    p.add_argument("--start", type=float, help="gate window start (default: first record)")
    p.add_argument("--v-max", type=float, help="speed cap for the queue count")
    p.add_argument("--speed-fraction", type=float, default=M.DEFAULT_SPEED_FRACTION)

    p = sub.add_parser("calibrate", help="grid-search model constants against a reference trajectory")
    p.add_argument("--scenario", required=True)
    p.add_argument("--ref", required=True, help="reference trajectory CSV")
    p.add_argument("--grid", required=True, help="YAML mapping parameter -> list of values")
    p.add_argument("--out", required=True, help="error table CSV; a .json summary is written beside it")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--holdout", type=float, default=0.0, help="fraction of reference agents held out")
    p.add_argument("--allow-unknown", action="store_true")
    return parser


def _read_bytes(path: str, what: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ValidationError("unreadable_file", f"cannot read {what}: {exc.strerror}", path) from None


def _load(args: argparse.Namespace, model: Optional[str] = None) -> Scenario:
    _read_bytes(args.scenario, "scenario")
    scenario = load_scenario(args.scenario, allow_unknown=args.allow_unknown)
    try:
        return with_overrides(scenario, model=model, seed=args.seed)
    except ValidationError as exc:
        raise exc.at("--seed" if args.seed is not None else "--model") from None


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load(args, args.model)
    progress = None
    if args.progress > 0:
        def progress(state: SimulationState) -> None:
            log.info("t=%.2f s, %d active", state.time, len(state.active))
    trajectory, summary = run(scenario, progress=progress, every=max(args.progress, 1))
    _write(Path(args.out), write_trajectory(trajectory))
    arrived = sum(t is not None for t in summary.arrival_times.values())
    log.info("%s: %d/%d arrived, %d steps, t=%g s, %.2f s wall", scenario.model, arrived,
             len(summary.arrival_times), summary.steps, summary.end_time, summary.wall_clock)
    return EXIT_OK


def compare_row(scenario: Scenario, trajectory, summary) -> list:
    """One metric-table row; queuing follows the bottleneck test used in the suite."""
    tracks = M.Tracks(trajectory)
    times = [t for t in summary.arrival_times.values() if t is not None]
    regions = scenario.regions
    evac = half = None
    if "room" in regions:
        evac = M.evacuation_time(tracks, regions["room"])
        half = M.half_exit_time(tracks, regions["room"])
    peak_queue = queuing = None
    if "upstream" in regions and "downstream" in regions:
        v_max = {a.id: a.v_max for a in scenario.agents}
        prof = M.queue_profile(tracks, regions["upstream"], regions["downstream"], v_max, until=half)
        if prof:
            # earliest sample of highest upstream density
            peak = max(prof, key=lambda s: (s.density_up, -s.time))
            peak_queue = peak.queued
        queuing = any(s.queued > 5 and s.density_up > 0 and s.density_up >= 2 * s.density_down
                      for s in prof)
    return [scenario.model, MOVEMENT[scenario.model], len(scenario.agents), len(times),
            sum(times) / len(times) if times else None, evac, half, peak_queue, queuing,
            summary.max_overlap if scenario.model != "cellular" else None]


COMPARE_COLUMNS = ["model", "movement", "agents", "arrived", "mean_arrival_time",
                   "evacuation_time", "half_exit_time", "queue_at_peak_density", "queuing",
                   "max_overlap"]


def cmd_compare(args: argparse.Namespace) -> int:
    base = _load(args)
    out = Path(args.out_dir)
    rows = []
    for model in MODELS:
        scenario = with_overrides(base, model=model)
        trajectory, summary = run(scenario)
        _write(out / f"trajectory_{model}.csv", write_trajectory(trajectory))
        rows.append(compare_row(scenario, trajectory, summary))
    table = M.format_table(COMPARE_COLUMNS, rows)
    _write(out / "compare.csv", table.encode("utf-8"))
    sys.stdout.write(table)
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    records = read_trajectory(_read_bytes(args.trajectory, "trajectory"), source=args.trajectory)
    tracks = M.Tracks(records)
    regions = []
    for spec in args.region:
        try:
            regions.append(M.MeasureRegion.parse(spec))
        except ValidationError as exc:
            raise exc.at("--region") from None
    if args.window is not None and not args.window > 0:
        raise ValidationError("invalid_param", "window must be > 0", "--window")
    if args.time is not None and not tracks.t_start <= args.time <= tracks.t_end:
        raise ValidationError("invalid_param",
                              f"time outside trajectory span [{tracks.t_start:g}, {tracks.t_end:g}]", "--time")
    if not 0 < args.speed_fraction < 1:
        raise ValidationError("invalid_param", "speed fraction must be in (0, 1)", "--speed-fraction")
    rows = []
    for region in regions:
        spec = region.spec()
        if region.kind == "area":
            rows.append([spec, "evacuation_time", M.evacuation_time(tracks, region)])
            if args.time is not None:
                rows.append([spec, "density", M.density(tracks, region, args.time)])
        else:
            window = args.window if args.window is not None else max(tracks.t_end - tracks.t_start, 1e-9)
            flow = M.gate_flow(tracks, region, window, args.start)
            rows += [[spec, "net_crossings", flow.net], [spec, "gross_crossings", flow.gross],
                     [spec, "net_flow", flow.net_flow], [spec, "gross_flow", flow.gross_flow]]
    if args.time is not None and args.v_max is not None:
        rows.append(["*", "queue", M.queue_metric(tracks, args.time, args.v_max, args.speed_fraction)])
    sys.stdout.write(M.format_table(["region", "metric", "value"], rows))
    return EXIT_OK


def _load_grid(path: str) -> dict[str, list[float]]:
    raw = _read_bytes(path, "grid")
    try:
        doc = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ValidationError("syntax_error", str(getattr(exc, "problem", exc)),
                              f"{path}:{mark.line + 1 if mark else 0}") from None
    if not isinstance(doc, dict) or not doc:
        raise ValidationError("bad_grid", "grid must be a non-empty mapping of name -> list", path)
    grid = {}
    for name, values in doc.items():
        if not isinstance(values, list) or not values or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in values):
            raise ValidationError("bad_grid", "expected a non-empty list of numbers", f"{path}: {name}")
        grid[str(name)] = [float(v) for v in values]
    return grid


def cmd_calibrate(args: argparse.Namespace) -> int:
    scenario = _load(args, args.model)
    ref = read_trajectory(_read_bytes(args.ref, "reference"), source=args.ref)
    grid = _load_grid(args.grid)
    if args.workers < 1:
        raise ValidationError("invalid_param", "workers must be >= 1", "--workers")
    try:
        report = calibrate(scenario, grid, ref, reference_id=args.ref, workers=args.workers,
                           quantize=True, holdout_fraction=args.holdout)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError("bad_reference", str(exc), args.ref) from None
    out = Path(args.out)
    _write(out, report.to_table().encode("utf-8"))
    _write(out.with_suffix(".json"), report.summary_json().encode("utf-8"))
    log.info("best %s rmse=%g", report.best_params, report.best_error)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "compare": cmd_compare, "metrics": cmd_metrics,
            "calibrate": cmd_calibrate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"micropeds: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"micropeds: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SimulationAborted as exc:
        print(f"micropeds: simulation aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
