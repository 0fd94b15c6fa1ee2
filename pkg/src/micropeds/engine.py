"""Time stepping shared by the three models.

Continuous models (magnetic, social) use explicit Euler with the velocity
updated first::

    v <- clamp(v + a dt, v_max)
    x <- x + v dt

after which positions are pushed out of any obstacle they penetrate and the
velocity component into that surface is dropped. The cellular model
advances one tick per step and ignores ``dt``. Step ``k`` ends at time
``k * step_length`` exactly, so clocks never accumulate rounding.
"""

from __future__ import annotations

import copy
import logging
import math
import time as _time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .cellular import Grid, build_grid, cellular_step, place_agents
from .errors import SimulationAborted
from .geometry import UNIT_X, ZERO, Vec2, distance
from .magnetic import magnetic_terms
from .rng import Rng
from .scene import Agent, Obstacle, Scenario
from .social import social_terms
from .trajectory import TrajectoryRecord

log = logging.getLogger(__name__)


@dataclass
class SimulationState:
    time: float
    agents: list[Agent]
    rng: Rng
    grid: Optional[Grid] = None
    trajectory: list[TrajectoryRecord] = field(default_factory=list)
    steps: int = 0
    arrival_times: dict[int, Optional[float]] = field(default_factory=dict)
    # deepest body overlap seen so far (continuous models only)
    max_overlap: float = 0.0

    @property
    def active(self) -> list[Agent]:
        return [a for a in self.agents if not a.arrived]


@dataclass
class RunSummary:
    arrival_times: dict[int, Optional[float]]
    steps: int
    end_time: float
    wall_clock: float
    max_overlap: float

    @property
    def all_arrived(self) -> bool:
        return all(t is not None for t in self.arrival_times.values())


def clamp_speed(v: Vec2, v_max: float) -> Vec2:
    speed = v.norm()
    if speed <= v_max:
        return v
    return v * (v_max / speed)


def project_out(pos: Vec2, vel: Vec2, radius: float, obstacles: Sequence[Obstacle],
                prev: Vec2, passes: int = 4) -> tuple[Vec2, Vec2]:
    """Push a disc of ``radius`` out of every obstacle it overlaps.

    Each correction places the center at ``radius`` from the nearest
    surface point and removes the inward velocity component. A few passes
    settle corners where two surfaces meet.
    """
    for _ in range(passes):
        moved = False
        for o in obstacles:
            q = o.nearest_point(pos)
            n = pos - q
            d = n.norm()
            if d >= radius:
                continue
            if d > 0.0:
                normal = n / d
            else:
                normal = (prev - q).unit()
                if normal == ZERO:
                    normal = UNIT_X
            pos = q + normal * radius
            vn = vel.dot(normal)
            if vn < 0.0:
                vel = vel - normal * vn
            moved = True
        if not moved:
            break
    return pos, vel


def init_state(scenario: Scenario) -> SimulationState:
    """Fresh state with the t=0 record of every agent."""
    agents = [copy.copy(a) for a in sorted(scenario.agents, key=lambda a: a.id)]
    state = SimulationState(time=0.0, agents=agents, rng=Rng(scenario.seed))
    if scenario.model == "cellular":
        cp = scenario.params.cellular
        state.grid = build_grid(scenario.bounds, scenario.all_obstacles, cp.cell_size)
        place_agents(state.grid, agents)
    for a in agents:
        state.arrival_times[a.id] = 0.0 if a.arrived else None
        if not a.arrived:
            state.trajectory.append(TrajectoryRecord(0.0, a.id, a.position, a.velocity))
    return state


def _continuous_update(state: SimulationState, scenario: Scenario,
                       movers: list[Agent], now: float) -> None:
    dt = scenario.dt
    obstacles = scenario.all_obstacles
    accels: list[Vec2] = []
    for a in movers:
        if scenario.model == "magnetic":
            terms = magnetic_terms(a, movers, obstacles, scenario.params.magnetic)
        else:
            terms = social_terms(a, movers, obstacles, scenario.params.social, now, state.rng)
        for name, value in terms.items():
            if not value.is_finite():
                raise SimulationAborted(a.id, f"{name} acceleration", now)
        total = ZERO
        for value in terms.values():
            total = total + value
        accels.append(total)
    for a, acc in zip(movers, accels):
        prev = a.position
        v = clamp_speed(a.velocity + acc * dt, a.v_max)
        x = a.position + v * dt
        x, v = project_out(x, v, a.radius, obstacles, prev)
        if not (x.is_finite() and v.is_finite()):
            raise SimulationAborted(a.id, "state", now)
        a.position, a.velocity = x, v
    for i, a in enumerate(movers):
        for b in movers[i + 1:]:
            depth = a.radius + b.radius - distance(a.position, b.position)
            if depth > state.max_overlap:
                state.max_overlap = depth


def step(state: SimulationState, scenario: Scenario) -> SimulationState:
    """Advance ``state`` by one model step in place and return it."""
    k = state.steps + 1
    new_time = k * scenario.time_step
    now = state.time
    present = state.active
    if scenario.model == "cellular":
        cellular_step(state.grid, state.agents, scenario.params.cellular,
                      scenario.arrival_tolerance)
    else:
        movers = []
        for a in present:
            if distance(a.position, a.destination) <= scenario.arrival_tolerance:
                a.arrived = True
                a.velocity = ZERO
            else:
                movers.append(a)
        if movers:
            _continuous_update(state, scenario, movers, now)
        for a in movers:
            if distance(a.position, a.destination) <= scenario.arrival_tolerance:
                a.arrived = True
    for a in present:
        state.trajectory.append(TrajectoryRecord(new_time, a.id, a.position, a.velocity))
        if a.arrived:
            state.arrival_times[a.id] = new_time
    state.time = new_time
    state.steps = k
    return state


def n_steps(scenario: Scenario) -> int:
    return math.ceil(scenario.max_time / scenario.time_step - 1e-9)


def run(scenario: Scenario, progress: Optional[Callable[[SimulationState], None]] = None,
        every: int = 100) -> tuple[list[TrajectoryRecord], RunSummary]:
    """Step until everyone arrived or ``max_time`` is reached.

    ``progress`` is called with the live state every ``every`` steps.
    """
    scenario.validate()
    started = _time.perf_counter()
    state = init_state(scenario)
    limit = n_steps(scenario)
    while state.steps < limit and state.active:
        step(state, scenario)
        if progress is not None and state.steps % every == 0:
            progress(state)
    summary = RunSummary(
        arrival_times=dict(state.arrival_times),
        steps=state.steps,
        end_time=state.time,
        wall_clock=_time.perf_counter() - started,
        max_overlap=state.max_overlap,
    )
    log.debug("run finished: %d steps, t=%g, %.3fs", summary.steps, summary.end_time, summary.wall_clock)
    return state.trajectory, summary
