"""Benefit-cost cellular model.

Pedestrians sit on cell centers, at most one per cell. Each tick every
pedestrian (ascending id) scores the nine cells around and including its
own and moves to the best one. A cell's score is the goal benefit

    K * p * |p| / (|S - X|^2 |D - X|^2),   p = (S - X) . (D - X)

plus a repulsion ``-1 / ((delta - alpha)^2 + beta)`` for each other
pedestrian within ``field_radius`` of the cell center, where S is the cell
center, X the pedestrian, D its destination and delta the distance from
the cell center to the other pedestrian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ArrivedAgentError, ValidationError
from .geometry import ZERO, Vec2, distance, segment_crosses_open_box, segments_intersect
from .params import CellularParams
from .scene import Agent, Bounds, Obstacle

Cell = tuple[int, int]  # (column, row)

# Row-major over (dy, dx); index 4 is the stay cell.
NEIGHBOR_OFFSETS: tuple[Cell, ...] = tuple((dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1))
STAY = 4
BLOCKED_SCORE = -math.inf


@dataclass
class Grid:
    origin: Vec2
    cell_size: float
    width: int
    height: int
    occupancy: dict[Cell, int] = field(default_factory=dict)
    blocked: frozenset[Cell] = frozenset()
    segments: tuple[tuple[Vec2, Vec2], ...] = ()
    # Cell whose center counts as each agent's destination for arrival.
    goal_cells: dict[int, Cell] = field(default_factory=dict)

    def cell_of(self, p: Vec2) -> Cell:
        i = math.floor((p.x - self.origin.x) / self.cell_size)
        j = math.floor((p.y - self.origin.y) / self.cell_size)
        # points on the far bounds edge belong to the last cell
        return (min(i, self.width - 1), min(j, self.height - 1))

    def center(self, c: Cell) -> Vec2:
        return Vec2(self.origin.x + (c[0] + 0.5) * self.cell_size,
                    self.origin.y + (c[1] + 0.5) * self.cell_size)

    def in_grid(self, c: Cell) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def move_allowed(self, src: Cell, dst: Cell) -> bool:
        """A step may not pass through any obstacle segment."""
        if src == dst:
            return True
        a, b = self.center(src), self.center(dst)
        return not any(segments_intersect(a, b, p, q) for p, q in self.segments)

    def admissible(self, src: Cell, dst: Cell, agent_id: int) -> bool:
        if not self.in_grid(dst) or dst in self.blocked:
            return False
        holder = self.occupancy.get(dst)
        if holder is not None and holder != agent_id:
            return False
        return self.move_allowed(src, dst)

    def agent_cells(self) -> dict[int, Cell]:
        return {aid: c for c, aid in self.occupancy.items()}


def build_grid(bounds: Bounds, obstacles: Iterable[Obstacle], cell_size: float) -> Grid:
    """Grid covering ``bounds``; cells whose interior an obstacle passes through are blocked."""
    width = max(1, math.ceil(bounds.width / cell_size - 1e-9))
    height = max(1, math.ceil(bounds.height / cell_size - 1e-9))
    origin = Vec2(bounds.xmin, bounds.ymin)
    segs = tuple(seg for o in obstacles for seg in o.segments)
    blocked: set[Cell] = set()
    for a, b in segs:
        i0 = math.floor((min(a.x, b.x) - origin.x) / cell_size)
        i1 = math.floor((max(a.x, b.x) - origin.x) / cell_size)
        j0 = math.floor((min(a.y, b.y) - origin.y) / cell_size)
        j1 = math.floor((max(a.y, b.y) - origin.y) / cell_size)
        for i in range(max(i0, 0), min(i1, width - 1) + 1):
            for j in range(max(j0, 0), min(j1, height - 1) + 1):
                x0 = origin.x + i * cell_size
                y0 = origin.y + j * cell_size
                if segment_crosses_open_box(a, b, x0, y0, x0 + cell_size, y0 + cell_size):
                    blocked.add((i, j))
    return Grid(origin, cell_size, width, height, blocked=frozenset(blocked), segments=segs)


def nearest_free_cell(grid: Grid, p: Vec2) -> Cell:
    """Unblocked cell whose center is closest to ``p`` (row-major tie-break)."""
    best, best_d = None, math.inf
    for j in range(grid.height):
        for i in range(grid.width):
            if (i, j) in grid.blocked:
                continue
            d = distance(grid.center((i, j)), p)
            if d < best_d:
                best, best_d = (i, j), d
    if best is None:
        raise ValidationError("no_free_cell", "every grid cell is blocked")
    return best


def place_agents(grid: Grid, agents: Sequence[Agent]) -> None:
    """Snap active agents onto their cell centers and fill occupancy."""
    for a in sorted(agents, key=lambda a: a.id):
        if a.arrived:
            continue
        c = grid.cell_of(a.position)
        loc = f"agents[id={a.id}].position"
        if c in grid.blocked:
            raise ValidationError("agent_in_blocked_cell", f"agent {a.id} starts in a blocked cell", loc)
        if c in grid.occupancy:
            raise ValidationError("cell_collision",
                                  f"agents {grid.occupancy[c]} and {a.id} start in the same cell", loc)
        grid.occupancy[c] = a.id
        a.position = grid.center(c)
        grid.goal_cells[a.id] = nearest_free_cell(grid, a.destination)


def benefit_score(S: Vec2, X: Vec2, D: Vec2, K: float) -> float:
    """Goal gain of moving from X to cell center S; ``K * sign(cos) * cos^2``."""
    dx, dy = D.x - X.x, D.y - X.y
    if dx == 0.0 and dy == 0.0:
        raise ArrivedAgentError("benefit undefined for an agent standing on its destination")
    sx, sy = S.x - X.x, S.y - X.y
    if sx == 0.0 and sy == 0.0:
        return 0.0
    p = sx * dx + sy * dy
    value = K * p * abs(p) / ((sx * sx + sy * sy) * (dx * dx + dy * dy))
    # Cauchy-Schwarz holds exactly; rounding can overshoot by an ulp.
    return min(K, max(-K, value))


def repulsion_score(delta: float, alpha_c: float, beta_c: float) -> float:
    return -1.0 / ((delta - alpha_c) ** 2 + beta_c)


def _score(grid: Grid, agent: Agent, cell: Cell, params: CellularParams,
           others: Sequence[Vec2]) -> float:
    src = grid.cell_of(agent.position)
    if not grid.admissible(src, cell, agent.id):
        return BLOCKED_SCORE
    S = grid.center(cell)
    total = benefit_score(S, agent.position, agent.destination, params.K)
    for q in others:
        delta = distance(S, q)
        if delta <= params.field_radius:
            total += repulsion_score(delta, params.alpha_c, params.beta_c)
    return total


def _others(grid: Grid, agent: Agent, reach: float) -> list[Vec2]:
    """Centers of other occupied cells within ``reach``, ascending agent id."""
    found = []
    for c, aid in grid.occupancy.items():
        if aid == agent.id:
            continue
        q = grid.center(c)
        if distance(q, agent.position) <= reach:
            found.append((aid, q))
    found.sort()
    return [q for _, q in found]


def cell_score(grid: Grid, agent: Agent, target_cell: Cell, params: CellularParams) -> float:
    """Net score of ``target_cell`` for ``agent``; ``-inf`` if it cannot go there."""
    return _score(grid, agent, target_cell, params, _others(grid, agent, math.inf))


def neighborhood_scores(grid: Grid, agent: Agent, params: CellularParams) -> list[float]:
    """Scores of the nine cells in :data:`NEIGHBOR_OFFSETS` order."""
    here = grid.cell_of(agent.position)
    # candidate centers are at most one cell diagonal from the agent
    others = _others(grid, agent, params.field_radius + grid.cell_size * math.sqrt(2.0) + 1e-9)
    return [_score(grid, agent, (here[0] + dx, here[1] + dy), params, others)
            for dx, dy in NEIGHBOR_OFFSETS]


def choose_cell(grid: Grid, agent: Agent, params: CellularParams) -> Cell:
    """Argmax of the nine scores; ties prefer staying, then row-major order."""
    here = grid.cell_of(agent.position)
    scores = neighborhood_scores(grid, agent, params)
    best = STAY
    for k, s in enumerate(scores):
        if k != STAY and s > scores[best]:
            best = k
    dx, dy = NEIGHBOR_OFFSETS[best]
    return (here[0] + dx, here[1] + dy)


def _at_goal(grid: Grid, agent: Agent, tolerance: float) -> bool:
    goal = grid.goal_cells[agent.id]
    return (distance(agent.position, grid.center(goal)) <= tolerance
            or agent.position == agent.destination)


def cellular_step(grid: Grid, agents: Sequence[Agent], params: CellularParams,
                  arrival_tolerance: float = 0.3) -> tuple[Grid, Sequence[Agent]]:
    """Advance every active agent by one tick, in place.

    Updates are sequential in ascending id, so later agents see the cells
    earlier agents just took. Arrived agents leave the grid.
    """
    for agent in sorted(agents, key=lambda a: a.id):
        if agent.arrived:
            continue
        here = grid.cell_of(agent.position)
        if _at_goal(grid, agent, arrival_tolerance):
            agent.velocity = ZERO
            _arrive(grid, agent, here)
            continue
        target = choose_cell(grid, agent, params)
        new_pos = grid.center(target)
        agent.velocity = (new_pos - agent.position) / params.tick
        if target != here:
            del grid.occupancy[here]
            grid.occupancy[target] = agent.id
        agent.position = new_pos
        if _at_goal(grid, agent, arrival_tolerance):
            _arrive(grid, agent, target)
    return grid, agents


def _arrive(grid: Grid, agent: Agent, cell: Cell) -> None:
    agent.arrived = True
    grid.occupancy.pop(cell, None)


def check_occupancy(grid: Grid, agents: Sequence[Agent]) -> list[str]:
    """Invariant violations of the grid state; empty when consistent."""
    problems = []
    cells = grid.agent_cells()
    active = [a for a in agents if not a.arrived]
    if len(cells) != len(grid.occupancy):
        problems.append("an agent id appears in more than one cell")
    for a in active:
        c = cells.get(a.id)
        if c is None:
            problems.append(f"agent {a.id} is not on the grid")
            continue
        if c in grid.blocked:
            problems.append(f"agent {a.id} in blocked cell {c}")
        if grid.center(c) != a.position:
            problems.append(f"agent {a.id} off its cell center")
    active_ids = {a.id for a in active}
    for c, aid in grid.occupancy.items():
        if aid not in active_ids:
            problems.append(f"cell {c} held by inactive agent {aid}")
    return problems
