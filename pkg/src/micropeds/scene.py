"""Agents, obstacles and the scenario container with its invariant checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ValidationError
from .geometry import ZERO, Vec2, nearest_point_on_polyline
from .metrics import MeasureRegion
from .params import ModelParams

MODELS = ("cellular", "magnetic", "social")


@dataclass
class Agent:
    id: int
    position: Vec2
    destination: Vec2
    target_time: float
    velocity: Vec2 = ZERO
    radius: float = 0.25
    mass: float = 1.0
    charge: float = 1.0
    v_max: float = 1.5
    v_min: float = 0.0
    arrived: bool = False

    def validate(self) -> None:
        loc = f"agents[id={self.id}]"
        if not isinstance(self.id, int) or isinstance(self.id, bool) or self.id < 0:
            raise ValidationError("bad_agent_id", f"id must be an integer >= 0, got {self.id!r}", loc)
        for name in ("position", "velocity", "destination"):
            if not getattr(self, name).is_finite():
                raise ValidationError("non_finite", f"{name} must be finite", f"{loc}.{name}")
        for name in ("target_time", "radius", "mass", "charge", "v_max", "v_min"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError("non_finite", f"{name} must be finite", f"{loc}.{name}")
        if self.target_time <= 0:
            raise ValidationError("bad_target_time", "target_time must be > 0", f"{loc}.target_time")
        if self.radius <= 0:
            raise ValidationError("bad_radius", "radius must be > 0", f"{loc}.radius")
        if self.mass <= 0:
            raise ValidationError("bad_mass", "mass must be > 0", f"{loc}.mass")
        if self.charge <= 0:
            raise ValidationError("bad_charge", "charge must be > 0 (pedestrians are positive poles)",
                                  f"{loc}.charge")
        if self.v_max <= 0:
            raise ValidationError("bad_v_max", "v_max must be > 0", f"{loc}.v_max")
        if self.v_min < 0:
            raise ValidationError("bad_v_min", "v_min must be >= 0", f"{loc}.v_min")
        if self.v_min > self.v_max:
            raise ValidationError("v_min_above_v_max", "v_min must not exceed v_max", f"{loc}.v_min")


@dataclass(frozen=True)
class Obstacle:
    """Polyline obstacle. Close it by repeating the first vertex at the end."""

    vertices: tuple[Vec2, ...]
    charge: float = 1.0

    def validate(self, loc: str = "obstacle") -> None:
        if len(self.vertices) < 2:
            raise ValidationError("too_few_vertices", "obstacle needs >= 2 vertices", f"{loc}.vertices")
        for i, v in enumerate(self.vertices):
            if not v.is_finite():
                raise ValidationError("non_finite", "vertex must be finite", f"{loc}.vertices[{i}]")
        for i, (a, b) in enumerate(zip(self.vertices, self.vertices[1:])):
            if a == b:
                raise ValidationError("repeated_vertex", "consecutive vertices must differ",
                                      f"{loc}.vertices[{i + 1}]")
        if not (math.isfinite(self.charge) and self.charge > 0):
            raise ValidationError("bad_charge", "obstacle charge must be > 0", f"{loc}.charge")

    def nearest_point(self, p: Vec2) -> Vec2:
        return nearest_point_on_polyline(p, self.vertices)

    @property
    def segments(self):
        return zip(self.vertices, self.vertices[1:])


def nearest_point_on_obstacle(p: Vec2, o: Obstacle) -> Vec2:
    return nearest_point_on_polyline(p, o.vertices)


@dataclass(frozen=True)
class Bounds:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, p: Vec2) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin


@dataclass
class Scenario:
    agents: list[Agent]
    bounds: Bounds
    model: str = "social"
    obstacles: list[Obstacle] = field(default_factory=list)
    walls: list[Obstacle] = field(default_factory=list)
    params: ModelParams = field(default_factory=ModelParams)
    dt: float = 0.05
    max_time: float = 60.0
    seed: int = 0
    arrival_tolerance: float = 0.3
    # Named measurement regions used by the compare/metrics tooling.
    regions: dict[str, MeasureRegion] = field(default_factory=dict)
    name: Optional[str] = None

    @property
    def all_obstacles(self) -> list[Obstacle]:
        return [*self.obstacles, *self.walls]

    @property
    def time_step(self) -> float:
        """Clock increment of one engine step for the selected model."""
        return self.params.cellular.tick if self.model == "cellular" else self.dt

    def validate(self) -> None:
        b = self.bounds
        if not all(math.isfinite(v) for v in (b.xmin, b.ymin, b.xmax, b.ymax)):
            raise ValidationError("non_finite", "bounds must be finite", "bounds")
        if not (b.xmax > b.xmin and b.ymax > b.ymin):
            raise ValidationError("bad_bounds", "bounds must have positive extent", "bounds")
        if self.model not in MODELS:
            raise ValidationError("unknown_model", f"model must be one of {MODELS}, got {self.model!r}",
                                  "model")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("bad_dt", "dt must be > 0", "dt")
        if not (math.isfinite(self.max_time) and self.max_time > 0):
            raise ValidationError("bad_max_time", "max_time must be > 0", "max_time")
        if not self.dt < self.max_time:
            raise ValidationError("dt_not_below_max_time", "dt must be < max_time", "dt")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError("bad_seed", "seed must be a 64-bit unsigned integer", "seed")
        if not (math.isfinite(self.arrival_tolerance) and self.arrival_tolerance > 0):
            raise ValidationError("bad_arrival_tolerance", "arrival_tolerance must be > 0",
                                  "arrival_tolerance")
        self.params.validate()
        seen: set[int] = set()
        for a in self.agents:
            a.validate()
            if a.id in seen:
                raise ValidationError("duplicate_agent_id", f"duplicate agent id {a.id}",
                                      f"agents[id={a.id}]")
            seen.add(a.id)
            if not b.contains(a.position):
                raise ValidationError("agent_out_of_bounds", f"agent {a.id} starts outside bounds",
                                      f"agents[id={a.id}].position")
        for kind in ("obstacles", "walls"):
            for i, o in enumerate(getattr(self, kind)):
                o.validate(f"{kind}[{i}]")
        for name, region in self.regions.items():
            try:
                region.validate()
            except ValidationError as exc:
                raise exc.at(f"regions.{name}") from None
