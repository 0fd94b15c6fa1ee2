"""Trajectory records and their canonical CSV encoding.

File layout::

    time,agent_id,x,y,vx,vy
    0.05,0,1,2,0.5,0

Reals are written with 9 significant digits (``%.9g``), rows sorted by
``(time, agent_id)``. Writing is byte-deterministic; reading a written file
returns every value rounded to 9 significant digits, so ``write`` of the
read-back records reproduces the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ValidationError
from .geometry import Vec2

HEADER = "time,agent_id,x,y,vx,vy"


@dataclass(frozen=True)
class TrajectoryRecord:
    time: float
    agent_id: int
    position: Vec2
    velocity: Vec2

    @property
    def speed(self) -> float:
        return self.velocity.norm()


class UnsortedTrajectory(ValueError):
    pass


def fmt_real(v: float) -> str:
    if v == 0.0:
        v = 0.0  # drops the sign of -0.0
    return format(v, ".9g")


def quantize(v: float) -> float:
    """Value as it survives a write/read cycle."""
    return float(fmt_real(v))


def quantize_record(r: TrajectoryRecord) -> TrajectoryRecord:
    return TrajectoryRecord(
        quantize(r.time), r.agent_id,
        Vec2(quantize(r.position.x), quantize(r.position.y)),
        Vec2(quantize(r.velocity.x), quantize(r.velocity.y)),
    )


def write_trajectory(records: Sequence[TrajectoryRecord]) -> bytes:
    lines = [HEADER]
    prev = None
    for i, r in enumerate(records):
        key = (r.time, r.agent_id)
        if prev is not None and not key > prev:
            raise UnsortedTrajectory(
                f"record {i} (t={r.time}, id={r.agent_id}) breaks (time, agent_id) order")
        prev = key
        lines.append(",".join((
            fmt_real(r.time), str(r.agent_id),
            fmt_real(r.position.x), fmt_real(r.position.y),
            fmt_real(r.velocity.x), fmt_real(r.velocity.y),
        )))
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_trajectory(data: bytes | str, source: str = "<trajectory>") -> list[TrajectoryRecord]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise ValidationError("bad_header", f"first line must be exactly {HEADER!r}", f"{source}:1")
    out: list[TrajectoryRecord] = []
    prev = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ValidationError("bad_row", f"expected 6 fields, got {len(parts)}", f"{source}:{lineno}")
        try:
            t = float(parts[0])
            aid = int(parts[1])
            x, y, vx, vy = (float(p) for p in parts[2:])
        except ValueError as exc:
            raise ValidationError("bad_row", str(exc), f"{source}:{lineno}") from None
        key = (t, aid)
        if prev is not None and not key > prev:
            raise ValidationError("unsorted", "rows must be sorted by (time, agent_id)",
                                  f"{source}:{lineno}")
        prev = key
        out.append(TrajectoryRecord(t, aid, Vec2(x, y), Vec2(vx, vy)))
    return out


def by_agent(records: Iterable[TrajectoryRecord]) -> dict[int, list[TrajectoryRecord]]:
    """Records grouped per agent, each list in time order."""
    out: dict[int, list[TrajectoryRecord]] = {}
    for r in records:
        out.setdefault(r.agent_id, []).append(r)
    for recs in out.values():
        recs.sort(key=lambda r: r.time)
    return out
