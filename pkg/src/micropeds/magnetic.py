"""Magnetic force model.

Pedestrians and obstacles are positive poles and each goal is a negative
pole, all interacting through Coulomb's law. On top of that, a pedestrian
closing in on someone (or something) ahead turns away with

    a = |V| cos(alpha) tan(beta)

perpendicular to its own velocity V, where alpha is the angle between V
and the line of sight to the other and beta the angle between the relative
velocity and that line of sight.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import ArrivedAgentError
from .geometry import UNIT_X, ZERO, Vec2
from .params import MagneticParams
from .scene import Agent, Obstacle


def coulomb_force(q1: float, q2: float, from_: Vec2, to: Vec2, k: float, r_min: float) -> Vec2:
    """Force on the pole ``q1`` at ``from_`` exerted by ``q2`` at ``to``.

    Positive ``q1 * q2`` pushes away from ``to``. The distance is clamped
    to ``r_min`` from below; coincident poles push along +x.
    """
    dx, dy = from_.x - to.x, from_.y - to.y
    r = math.hypot(dx, dy)
    if r == 0.0:
        return UNIT_X * (k * q1 * q2 / (r_min * r_min))
    rc = max(r, r_min)
    magnitude = k * q1 * q2 / (rc * rc)
    # unit vector first; magnitude / r overflows at subnormal r
    return Vec2(dx / r * magnitude, dy / r * magnitude)


def avoidance_acceleration(V: Vec2, other_pos: Vec2, other_vel: Vec2, self_pos: Vec2,
                           beta_max: float) -> Vec2:
    speed = V.norm()
    los = other_pos - self_pos
    dist = los.norm()
    if speed == 0.0 or dist == 0.0:
        return ZERO
    # normalize separately; speed * dist can underflow
    cos_alpha = min(1.0, (V / speed).dot(los / dist))
    if cos_alpha <= 0.0:
        return ZERO
    rv = V - other_vel
    closing = rv.dot(los)
    if closing <= 0.0:
        return ZERO
    beta = math.atan2(abs(rv.cross(los)), closing)
    magnitude = speed * cos_alpha * math.tan(min(beta, beta_max))
    if magnitude == 0.0:
        return ZERO
    left = V.perp() / speed
    # Turn right when the other is to the left or dead ahead.
    side = -1.0 if V.cross(los) >= 0.0 else 1.0
    return left * (side * magnitude)


def magnetic_terms(agent: Agent, others: Sequence[Agent], obstacles: Sequence[Obstacle],
                   params: MagneticParams) -> dict[str, Vec2]:
    """Acceleration contributions (m/s^2) keyed by source, for diagnostics."""
    if agent.position == agent.destination:
        raise ArrivedAgentError(f"agent {agent.id} is at its destination")
    k, r_min = params.k_coulomb, params.r_min
    q, x = agent.charge, agent.position
    goal = coulomb_force(q, params.goal_charge, x, agent.destination, k, r_min)
    peds = ZERO
    avoid = ZERO
    for other in sorted(others, key=lambda a: a.id):
        if other.id == agent.id or other.arrived:
            continue
        peds = peds + coulomb_force(q, other.charge, x, other.position, k, r_min)
        if (other.position - x).norm() <= params.avoid_radius:
            avoid = avoid + avoidance_acceleration(agent.velocity, other.position, other.velocity,
                                                   x, params.beta_max)
    walls = ZERO
    for o in obstacles:
        p = o.nearest_point(x)
        walls = walls + coulomb_force(q, o.charge, x, p, k, r_min)
        if (p - x).norm() <= params.avoid_radius:
            avoid = avoid + avoidance_acceleration(agent.velocity, p, ZERO, x, params.beta_max)
    m = agent.mass
    return {"goal": goal / m, "pedestrians": peds / m, "obstacles": walls / m, "avoidance": avoid}


def magnetic_acceleration(agent: Agent, others: Sequence[Agent], obstacles: Sequence[Obstacle],
                          params: MagneticParams) -> Vec2:
    t = magnetic_terms(agent, others, obstacles, params)
    return t["goal"] + t["pedestrians"] + t["obstacles"] + t["avoidance"]
