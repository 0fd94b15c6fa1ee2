"""Grid-search calibration of model constants against reference trajectories.

Every point of the cartesian parameter grid is simulated with the
scenario's seed and the fluctuation switched off. The point with the
smallest positional RMSE against the reference wins; ties go to the
earliest point in row-major order (last parameter varies fastest).
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .engine import run
from .errors import SimulationAborted, ValidationError
from .metrics import Tracks, format_table
from .scene import Scenario
from .trajectory import TrajectoryRecord, quantize_record

ParamGrid = Mapping[str, Sequence[float]]


@dataclass
class FitRow:
    params: dict[str, float]
    error: float
    velocity_error: float
    holdout_error: Optional[float] = None


@dataclass
class FitReport:
    model: str
    best_params: dict[str, float]
    best_error: float
    error_table: list[FitRow]
    reference_id: str = ""
    holdout_ids: list[int] = field(default_factory=list)

    @property
    def best_row(self) -> FitRow:
        return next(r for r in self.error_table if r.params == self.best_params)

    def to_table(self) -> str:
        names = list(self.best_params)
        rows = [[*(r.params[n] for n in names), r.error, r.velocity_error, r.holdout_error]
                for r in self.error_table]
        return format_table([*names, "position_rmse", "velocity_rmse", "holdout_rmse"], rows)

    def summary(self) -> dict:
        def finite(v):
            return v if v is None or math.isfinite(v) else None
        return {
            "model": self.model,
            "reference": self.reference_id,
            "best_params": self.best_params,
            "best_error": finite(self.best_error),
            "best_velocity_error": finite(self.best_row.velocity_error),
            "holdout_ids": self.holdout_ids,
            "holdout_error": finite(self.best_row.holdout_error),
            "grid_size": len(self.error_table),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _sample_errors(sim: Iterable[TrajectoryRecord] | Tracks, ref: Iterable[TrajectoryRecord],
                   ids: Optional[set[int]] = None) -> tuple[list[float], list[float]]:
    """Squared position and velocity errors at every reference sample.

    Past an agent's last simulated record its final state is held, since
    the simulator stops recording agents once they arrive.
    """
    tracks = Tracks.of(sim)
    ref = [r for r in ref if ids is None or r.agent_id in ids]
    if not ref:
        raise ValueError("reference trajectory has no samples to compare")
    ref_ids = {r.agent_id for r in ref}
    missing = sorted(ref_ids - set(tracks.recs))
    if len(missing) == len(ref_ids):
        raise ValueError("simulated and reference trajectories share no agent ids")
    if missing:
        raise ValueError(f"reference agents missing from simulation: {missing}")
    pos_err, vel_err = [], []
    for r in ref:
        times = tracks.times[r.agent_id]
        if r.time < times[0]:
            raise ValueError(f"reference time {r.time} precedes simulation of agent {r.agent_id}")
        state = tracks.at(r.agent_id, r.time)
        if state is None:
            last = tracks.recs[r.agent_id][-1]
            state = (last.position, last.velocity)
        dp = state[0] - r.position
        dv = state[1] - r.velocity
        pos_err.append(dp.dot(dp))
        vel_err.append(dv.dot(dv))
    return pos_err, vel_err


def trajectory_rmse(sim: Iterable[TrajectoryRecord] | Tracks, ref: Iterable[TrajectoryRecord],
                    ids: Optional[set[int]] = None) -> float:
    """Root-mean-square positional deviation over all reference samples."""
    pos_err, _ = _sample_errors(sim, ref, ids)
    return math.sqrt(sum(pos_err) / len(pos_err))


def velocity_rmse(sim: Iterable[TrajectoryRecord] | Tracks, ref: Iterable[TrajectoryRecord],
                  ids: Optional[set[int]] = None) -> float:
    _, vel_err = _sample_errors(sim, ref, ids)
    return math.sqrt(sum(vel_err) / len(vel_err))


def grid_points(grid: ParamGrid) -> list[dict[str, float]]:
    """Cartesian product in row-major order."""
    names = list(grid)
    for name in names:
        if len(grid[name]) == 0:
            raise ValidationError("empty_grid", f"no candidate values for {name!r}", f"grid.{name}")
    return [dict(zip(names, map(float, combo))) for combo in itertools.product(*(grid[n] for n in names))]


def apply_params(scenario: Scenario, point: Mapping[str, float]) -> Scenario:
    """Copy of ``scenario`` with ``point`` substituted into its model's constants.

    The fluctuation is switched off so each run is reproducible.
    """
    block = scenario.params.for_model(scenario.model)
    known = {f.name for f in dataclasses.fields(block)}
    unknown = sorted(set(point) - known)
    if unknown:
        raise ValidationError("unknown_param",
                              f"{unknown} are not {scenario.model} parameters (known: {sorted(known)})",
                              "grid")
    changes = dict(point)
    if scenario.model == "social":
        changes["sigma_xi"] = 0.0
    new_block = dataclasses.replace(block, **changes)
    params = dataclasses.replace(scenario.params, **{scenario.model: new_block})
    out = dataclasses.replace(scenario, params=params)
    out.validate()
    return out


def _simulate(scenario: Scenario) -> Optional[list[TrajectoryRecord]]:
    try:
        trajectory, _ = run(scenario)
    except SimulationAborted:
        return None
    return trajectory


def holdout_split(ref: Iterable[TrajectoryRecord], fraction: float) -> tuple[set[int], set[int]]:
    """Split reference agent ids into (train, holdout); holdout takes the highest ids."""
    if not 0 <= fraction < 1:
        raise ValueError(f"holdout fraction must be in [0, 1), got {fraction}")
    ids = sorted({r.agent_id for r in ref})
    n_hold = math.ceil(fraction * len(ids)) if fraction > 0 else 0
    n_hold = min(n_hold, len(ids) - 1)
    return set(ids[:len(ids) - n_hold]), set(ids[len(ids) - n_hold:])


def calibrate(scenario: Scenario, grid: ParamGrid, ref: Sequence[TrajectoryRecord],
              reference_id: str = "", workers: int = 1, quantize: bool = False,
              holdout_fraction: float = 0.0) -> FitReport:
    """Exhaustive search of ``grid`` for the constants that best reproduce ``ref``.

    ``quantize`` rounds simulated records the way the trajectory file does,
    so a reference read back from disk can still be matched exactly.
    Runs that abort on non-finite forces score an infinite error.
    """
    points = grid_points(grid)
    scenarios = [apply_params(scenario, p) for p in points]
    train, hold = holdout_split(ref, holdout_fraction)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(_simulate, scenarios))
    else:
        trajectories = [_simulate(s) for s in scenarios]

    table = []
    for point, traj in zip(points, trajectories):
        if traj is None:
            table.append(FitRow(point, math.inf, math.inf, math.inf if hold else None))
            continue
        if quantize:
            traj = [quantize_record(r) for r in traj]
        tracks = Tracks(traj)
        pos_err, vel_err = _sample_errors(tracks, ref, train)
        row = FitRow(point, math.sqrt(sum(pos_err) / len(pos_err)),
                     math.sqrt(sum(vel_err) / len(vel_err)))
        if hold:
            row.holdout_error = trajectory_rmse(tracks, ref, hold)
        table.append(row)

    best = table[0]
    for row in table[1:]:
        if row.error < best.error:
            best = row
    return FitReport(scenario.model, dict(best.params), best.error, table, reference_id, sorted(hold))
