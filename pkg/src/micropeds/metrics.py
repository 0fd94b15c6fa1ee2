"""Flow, density, evacuation and queue measurements over trajectories.

Every function here is a pure function of a record list, so metrics can be
recomputed offline from a trajectory file. Positions and velocities between
records are linearly interpolated. Area membership is half-open:
``xmin <= x < xmax`` and ``ymin <= y < ymax``.
"""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import ValidationError
from .geometry import Vec2
from .trajectory import TrajectoryRecord, by_agent, fmt_real

DEFAULT_SPEED_FRACTION = 0.2


class InvalidRegion(ValueError):
    pass


@dataclass(frozen=True)
class MeasureRegion:
    """Axis-aligned box (``kind="area"``) or line segment (``kind="gate"``).

    For an area, ``a`` is the min corner and ``b`` the max corner.
    """

    kind: str
    a: Vec2
    b: Vec2

    @classmethod
    def area(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "MeasureRegion":
        return cls("area", Vec2(xmin, ymin), Vec2(xmax, ymax))

    @classmethod
    def gate(cls, x0: float, y0: float, x1: float, y1: float) -> "MeasureRegion":
        return cls("gate", Vec2(x0, y0), Vec2(x1, y1))

    @classmethod
    def parse(cls, spec: str) -> "MeasureRegion":
        """Parse ``area:xmin,ymin,xmax,ymax`` or ``gate:x0,y0,x1,y1``."""
        kind, _, rest = spec.partition(":")
        try:
            nums = [float(v) for v in rest.split(",")]
        except ValueError:
            raise ValidationError("bad_region", f"cannot parse region {spec!r}") from None
        if kind not in ("area", "gate") or len(nums) != 4:
            raise ValidationError("bad_region",
                                  f"region must look like area:x0,y0,x1,y1 or gate:x0,y0,x1,y1, got {spec!r}")
        region = cls(kind, Vec2(nums[0], nums[1]), Vec2(nums[2], nums[3]))
        region.validate()
        return region

    def spec(self) -> str:
        return f"{self.kind}:" + ",".join(repr(float(v)) for v in (*self.a, *self.b))

    def validate(self) -> None:
        if not (self.a.is_finite() and self.b.is_finite()):
            raise ValidationError("bad_region", "region coordinates must be finite")
        if self.kind == "area":
            if not (self.b.x > self.a.x and self.b.y > self.a.y):
                raise ValidationError("bad_region", "area region needs positive extent")
        elif self.kind == "gate":
            if self.a == self.b:
                raise ValidationError("bad_region", "gate endpoints must differ")
        else:
            raise ValidationError("bad_region", f"unknown region kind {self.kind!r}")

    @property
    def size(self) -> float:
        return (self.b.x - self.a.x) * (self.b.y - self.a.y)

    def contains(self, p: Vec2) -> bool:
        return self.a.x <= p.x < self.b.x and self.a.y <= p.y < self.b.y


def _need(region: MeasureRegion, kind: str) -> None:
    if region.kind != kind:
        raise InvalidRegion(f"expected a {kind} region, got {region.kind}")


def _interp(recs: Sequence[TrajectoryRecord], times: Sequence[float], t: float):
    """(position, velocity) at ``t`` or None outside the agent's record span."""
    if not recs or t < times[0] or t > times[-1]:
        return None
    i = bisect.bisect_left(times, t)
    if times[i] == t:
        return recs[i].position, recs[i].velocity
    r0, r1 = recs[i - 1], recs[i]
    w = (t - r0.time) / (r1.time - r0.time)
    pos = r0.position + (r1.position - r0.position) * w
    vel = r0.velocity + (r1.velocity - r0.velocity) * w
    return pos, vel


class Tracks:
    """Per-agent record lists with cached time arrays.

    Build one and pass it instead of a record list when evaluating many
    metrics over the same trajectory.
    """

    def __init__(self, trajectory: Iterable[TrajectoryRecord]) -> None:
        self.recs = by_agent(trajectory)
        self.times = {aid: [r.time for r in rs] for aid, rs in self.recs.items()}
        if self.recs:
            self.t_start = min(ts[0] for ts in self.times.values())
            self.t_end = max(ts[-1] for ts in self.times.values())
        else:
            self.t_start = self.t_end = 0.0

    def at(self, aid: int, t: float):
        return _interp(self.recs[aid], self.times[aid], t)

    @classmethod
    def of(cls, trajectory: "Iterable[TrajectoryRecord] | Tracks") -> "Tracks":
        return trajectory if isinstance(trajectory, Tracks) else cls(trajectory)

    def records(self) -> list[TrajectoryRecord]:
        return [r for rs in self.recs.values() for r in rs]

    def check_span(self, t: float) -> None:
        if not self.recs or not self.t_start <= t <= self.t_end:
            raise ValueError(f"time {t} outside trajectory span [{self.t_start}, {self.t_end}]")


def exit_times(trajectory: Iterable[TrajectoryRecord] | Tracks,
               region: MeasureRegion) -> dict[int, Optional[float]]:
    """Per agent: earliest record time after which it is never inside ``region``.

    0.0 for agents never recorded inside; None when the last record is inside.
    """
    _need(region, "area")
    out: dict[int, Optional[float]] = {}
    for aid, recs in Tracks.of(trajectory).recs.items():
        last_inside = None
        for i, r in enumerate(recs):
            if region.contains(r.position):
                last_inside = i
        if last_inside is None:
            out[aid] = 0.0
        elif last_inside == len(recs) - 1:
            out[aid] = None
        else:
            out[aid] = recs[last_inside + 1].time
    return out


def evacuation_time(trajectory: Iterable[TrajectoryRecord] | Tracks,
                    region: MeasureRegion) -> Optional[float]:
    """Earliest time after which no recorded position lies inside ``region``."""
    per_agent = exit_times(trajectory, region)
    if any(t is None for t in per_agent.values()):
        return None
    return max(per_agent.values(), default=0.0)


class Crossing(NamedTuple):
    time: float
    agent_id: int
    sign: int


class GateFlow(NamedTuple):
    net: int
    gross: int
    window: float

    @property
    def net_flow(self) -> float:
        return self.net / self.window

    @property
    def gross_flow(self) -> float:
        return self.gross / self.window


def gate_crossings(trajectory: Iterable[TrajectoryRecord] | Tracks,
                   gate: MeasureRegion) -> list[Crossing]:
    """Every crossing of the gate segment, in time order.

    Sides are classed as ``cross(gate, p - gate.a) >= 0`` (left, incl. the
    line) and ``< 0`` (right). A crossing is a side change between
    consecutive records whose interpolated line hit lies on the segment.
    Right-to-left is +1.
    """
    _need(gate, "gate")
    g = gate.b - gate.a
    glen2 = g.dot(g)
    out: list[Crossing] = []
    for aid, recs in Tracks.of(trajectory).recs.items():
        for r0, r1 in zip(recs, recs[1:]):
            s0 = g.cross(r0.position - gate.a)
            s1 = g.cross(r1.position - gate.a)
            left0, left1 = s0 >= 0, s1 >= 0
            if left0 == left1:
                continue
            w = s0 / (s0 - s1)
            hit = r0.position + (r1.position - r0.position) * w
            u = (hit - gate.a).dot(g) / glen2
            if 0.0 <= u <= 1.0:
                t = r0.time + (r1.time - r0.time) * w
                out.append(Crossing(t, aid, 1 if left1 else -1))
    out.sort()
    return out


def gate_flow(trajectory: Iterable[TrajectoryRecord] | Tracks, gate: MeasureRegion,
              window: float, start: Optional[float] = None) -> GateFlow:
    """Crossings of ``gate`` in ``[start, start + window)`` per second.

    ``start`` defaults to the first record time.
    """
    if not window > 0:
        raise ValueError(f"window must be > 0, got {window}")
    tracks = Tracks.of(trajectory)
    crossings = gate_crossings(tracks, gate)
    if start is None:
        start = tracks.t_start
    inside = [c for c in crossings if start <= c.time < start + window]
    return GateFlow(sum(c.sign for c in inside), len(inside), window)


def density(trajectory: Iterable[TrajectoryRecord] | Tracks, region: MeasureRegion, t: float) -> float:
    """Agents inside ``region`` at time ``t`` per square meter."""
    _need(region, "area")
    tracks = Tracks.of(trajectory)
    tracks.check_span(t)
    count = 0
    for aid in tracks.recs:
        s = tracks.at(aid, t)
        if s is not None and region.contains(s[0]):
            count += 1
    return count / region.size


def queue_metric(trajectory: Iterable[TrajectoryRecord] | Tracks, t: float,
                 v_max: float | Mapping[int, float],
                 speed_fraction: float = DEFAULT_SPEED_FRACTION) -> int:
    """Number of unarrived agents moving slower than ``speed_fraction * v_max`` at ``t``.

    The trajectory carries no v_max, so it is passed in: one value for all
    agents or a per-id mapping. An agent counts as present from its first
    record; its final record marks arrival unless it coincides with the end
    of the whole trajectory (a timeout).
    """
    if not 0 < speed_fraction < 1:
        raise ValueError(f"speed_fraction must be in (0, 1), got {speed_fraction}")
    tracks = Tracks.of(trajectory)
    count = 0
    for aid, times in tracks.times.items():
        if t > times[-1] or (t == times[-1] and times[-1] < tracks.t_end):
            continue
        s = tracks.at(aid, t)
        if s is None:
            continue
        cap = v_max[aid] if isinstance(v_max, Mapping) else v_max
        if s[1].norm() < speed_fraction * cap:
            count += 1
    return count


def record_times(trajectory: "Iterable[TrajectoryRecord] | Tracks") -> list[float]:
    return sorted({t for ts in Tracks.of(trajectory).times.values() for t in ts})


def format_table(columns: Sequence[str], rows: Iterable[Sequence[object]], sep: str = ",") -> str:
    """Delimiter-separated text table; reals use the trajectory rendering.

    Cells containing the delimiter are quoted CSV-style.
    """
    def cell(v: object) -> str:
        if v is None:
            return ""
        if isinstance(v, bool):
            return "yes" if v else "no"
        if isinstance(v, float):
            return fmt_real(v)
        return str(v)

    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=sep, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([cell(v) for v in row] for row in rows)
    return buf.getvalue()


class QueueSample(NamedTuple):
    time: float
    queued: int
    density_up: float
    density_down: float


def queue_profile(trajectory: Iterable[TrajectoryRecord] | Tracks, upstream: MeasureRegion,
                  downstream: MeasureRegion, v_max: float | Mapping[int, float],
                  speed_fraction: float = DEFAULT_SPEED_FRACTION,
                  until: Optional[float] = None) -> list[QueueSample]:
    """Queue count and densities either side of a bottleneck at every record time."""
    tracks = Tracks.of(trajectory)
    out = []
    for t in record_times(tracks):
        if until is not None and t >= until:
            break
        out.append(QueueSample(t, queue_metric(tracks, t, v_max, speed_fraction),
                               density(tracks, upstream, t), density(tracks, downstream, t)))
    return out


def half_exit_time(trajectory: Iterable[TrajectoryRecord] | Tracks,
                   region: MeasureRegion) -> Optional[float]:
    """Time by which half of the agents (rounded up) have left ``region`` for good."""
    per_agent = exit_times(trajectory, region)
    done = sorted(t for t in per_agent.values() if t is not None)
    need = (len(per_agent) + 1) // 2
    return done[need - 1] if need and len(done) >= need else None
