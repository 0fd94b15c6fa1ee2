"""Social force model.

Acceleration of pedestrian i::

    dv/dt = (v0 e - v) / tau + sum_j f_ij / m + f_b / m + xi

with v0 the intended speed (remaining distance over remaining time,
clamped to [v_min, v_max]), e the unit vector to the destination, f_ij a
circular exponential repulsion between bodies and f_b the same shape
against walls and obstacles. xi is a zero-mean Gaussian fluctuation per
velocity component.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

from .errors import ArrivedAgentError
from .geometry import UNIT_X, ZERO, Vec2
from .params import SocialParams
from .rng import Rng, draw_gaussian
from .scene import Agent, Obstacle


def intended_speed(position: Vec2, destination: Vec2, target_time: float, now: float,
                   v_max: float, v_min: float) -> float:
    remaining = target_time - now
    if remaining <= 0:
        return v_max
    ideal = (destination - position).norm() / remaining
    return min(v_max, max(v_min, ideal))


def driving_force(agent: Agent, v0: float, now: float, tau: float) -> Vec2:
    """Relaxation toward the intended velocity, ``m (v0 e - v) / tau``."""
    if agent.position == agent.destination:
        raise ArrivedAgentError(f"agent {agent.id} is at its destination")
    e = (agent.destination - agent.position).unit()
    desired = e * v0
    return (desired - agent.velocity) * (agent.mass / tau)


def pair_force(self_: Agent, other: Agent, A: float, B: float) -> Vec2:
    """Repulsion on ``self_`` from ``other``: ``m A exp((r_i + r_j - d) / B)``."""
    dx = self_.position.x - other.position.x
    dy = self_.position.y - other.position.y
    d = math.hypot(dx, dy)
    magnitude = self_.mass * A * math.exp((self_.radius + other.radius - d) / B)
    if d == 0.0:
        return UNIT_X * magnitude
    # unit vector first; magnitude / d overflows at subnormal d
    return Vec2(dx / d * magnitude, dy / d * magnitude)


def boundary_force(agent: Agent, obstacles: Sequence[Obstacle], wall_A: float, wall_B: float) -> Vec2:
    total = ZERO
    for o in obstacles:
        p = o.nearest_point(agent.position)
        n = agent.position - p
        d = n.norm()
        magnitude = agent.mass * wall_A * math.exp((agent.radius - d) / wall_B)
        total = total + (UNIT_X * magnitude if d == 0.0 else (n / d) * magnitude)
    return total


def social_terms(agent: Agent, others: Sequence[Agent], obstacles: Sequence[Obstacle],
                 params: SocialParams, now: float, rng: Optional[Rng] = None) -> dict[str, Vec2]:
    """Acceleration contributions (m/s^2) keyed by source.

    The two noise components are drawn x then y, and only when
    ``sigma_xi > 0``.
    """
    v0 = intended_speed(agent.position, agent.destination, agent.target_time, now,
                        agent.v_max, agent.v_min)
    drive = driving_force(agent, v0, now, params.tau)
    pairs = ZERO
    for other in sorted(others, key=lambda a: a.id):
        if other.id == agent.id or other.arrived:
            continue
        pairs = pairs + pair_force(agent, other, params.A, params.B)
    walls = boundary_force(agent, obstacles, params.wall_A, params.wall_B)
    m = agent.mass
    noise = ZERO
    if params.sigma_xi > 0:
        if rng is None:
            raise ValueError("sigma_xi > 0 needs an Rng")
        noise = Vec2(draw_gaussian(rng, params.sigma_xi), draw_gaussian(rng, params.sigma_xi))
    return {"driving": drive / m, "pedestrians": pairs / m, "boundaries": walls / m, "fluctuation": noise}


def social_acceleration(agent: Agent, others: Sequence[Agent], obstacles: Sequence[Obstacle],
                        params: SocialParams, now: float, rng: Optional[Rng] = None) -> Vec2:
    t = social_terms(agent, others, obstacles, params, now, rng)
    return t["driving"] + t["pedestrians"] + t["boundaries"] + t["fluctuation"]
