import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from micropeds import Agent, Obstacle, Vec2
from micropeds.errors import ArrivedAgentError
from micropeds.params import SocialParams
from micropeds.rng import Rng
from micropeds.social import (boundary_force, driving_force, intended_speed, pair_force, social_acceleration,
                              social_terms)

P = SocialParams()


def walker(i=0, pos=(0, 0), vel=(0, 0), dest=(10, 0), **kw):
    return Agent(i, Vec2(*pos), Vec2(*dest), kw.pop("target_time", 20.0), velocity=Vec2(*vel), **kw)


def test_intended_speed_examples():
    assert intended_speed(Vec2(0, 0), Vec2(10, 0), 20.0, 0.0, 3.0, 0.0) == 0.5
    assert intended_speed(Vec2(0, 0), Vec2(10, 0), 2.0, 0.0, 2.0, 0.0) == 2.0
    assert intended_speed(Vec2(4, 4), Vec2(4, 4), 20.0, 0.0, 2.0, 0.3) == 0.3


def test_intended_speed_after_deadline_is_cap():
    assert intended_speed(Vec2(0, 0), Vec2(10, 0), 5.0, 5.0, 1.8, 0.0) == 1.8
    assert intended_speed(Vec2(0, 0), Vec2(10, 0), 5.0, 9.0, 1.8, 0.0) == 1.8


def test_driving_force_examples():
    assert driving_force(walker(vel=(1.5, 0)), 1.5, 0.0, 0.5) == Vec2(0, 0)
    assert driving_force(walker(), 1.5, 0.0, 0.5) == Vec2(3.0, 0)
    assert driving_force(walker(vel=(3, 0)), 1.5, 0.0, 0.5) == Vec2(-3.0, 0)


def test_driving_force_scales_with_mass():
    assert driving_force(walker(mass=80.0), 1.5, 0.0, 0.5) == Vec2(240.0, 0)


def test_driving_force_arrived_raises():
    with pytest.raises(ArrivedAgentError):
        driving_force(walker(pos=(10, 0)), 1.0, 0.0, 0.5)


def test_pair_force_examples():
    a, b = walker(pos=(0, 0)), walker(1, pos=(0.5, 0))
    assert pair_force(a, b, 2.0, 0.3) == Vec2(-2.0, 0)
    c = walker(1, pos=(0.8, 0))
    assert pair_force(a, c, 2.0, 0.3).norm() == pytest.approx(2.0 / math.e, rel=1e-15)
    assert pair_force(a, walker(1, pos=(50, 0)), 2.0, 0.3).norm() < 1e-60


def test_pair_force_coincident_falls_back_to_x():
    a, b = walker(), walker(1)
    f = pair_force(a, b, 2.0, 0.3)
    assert f.y == 0 and f.x == pytest.approx(2.0 * math.exp(0.5 / 0.3))


coord = st.floats(-20, 20)


@given(coord, coord, coord, coord)
def test_pair_force_newton_third_law(x1, y1, x2, y2):
    a, b = walker(pos=(x1, y1)), walker(1, pos=(x2, y2))
    if a.position == b.position:
        return
    assert pair_force(a, b, 2.0, 0.3) == -pair_force(b, a, 2.0, 0.3)


def test_forces_stay_finite_at_subnormal_separation():
    tiny = 2.2250738585072014e-308
    f = pair_force(walker(), walker(1, pos=(0.0, tiny)), 2.0, 0.3)
    assert f.x == 0.0 and f.y == pytest.approx(-2.0 * math.exp(0.5 / 0.3))
    wall = Obstacle((Vec2(-1, tiny), Vec2(1, tiny)))
    g = boundary_force(walker(), [wall], 10.0, 0.2)
    assert g.x == 0.0 and g.y == pytest.approx(-10.0 * math.exp(0.25 / 0.2))


@given(st.floats(0, 10), st.floats(0, 10))
def test_pair_force_strictly_decreasing(d1, d2):
    a = walker()
    f = lambda d: pair_force(a, walker(1, pos=(d, 0)), 2.0, 0.3).norm()
    if d2 - d1 > 1e-9 and f(d2) > 0:
        assert f(d1) > f(d2)


def test_boundary_force_examples():
    a = walker(pos=(0, 1.0), radius=0.25)
    assert boundary_force(a, [], 10.0, 0.2) == Vec2(0, 0)
    touching = Obstacle((Vec2(-5, 0.75), Vec2(5, 0.75)))
    f = boundary_force(a, [touching], 10.0, 0.2)
    assert f.x == 0 and f.y == pytest.approx(10.0, rel=1e-15)
    farther = Obstacle((Vec2(-5, 0.55), Vec2(5, 0.55)))
    assert boundary_force(a, [farther], 10.0, 0.2).y == pytest.approx(10.0 / math.e, rel=1e-14)


def test_lone_agent_at_intended_velocity():
    a = walker(vel=(0.5, 0))
    assert social_acceleration(a, [a], [], P, 0.0) == Vec2(0, 0)


def test_lone_agent_from_rest():
    a = walker(mass=70.0)
    assert social_acceleration(a, [a], [], P, 0.0) == driving_force(a, 0.5, 0.0, P.tau) / 70.0


def test_agent_and_neighbor_sum():
    a = walker()
    b = walker(1, pos=(1.0, 0.3), vel=(-1, 0), dest=(-10, 0))
    expected = driving_force(a, 0.5, 0.0, P.tau) + pair_force(a, b, P.A, P.B)
    assert social_acceleration(a, [a, b], [], P, 0.0) == expected


def test_arrived_neighbors_ignored():
    a = walker()
    b = walker(1, pos=(0.5, 0), arrived=True)
    assert social_acceleration(a, [a, b], [], P, 0.0) == social_acceleration(a, [a], [], P, 0.0)


def test_fluctuation_drawn_only_when_enabled():
    a = walker()
    noisy = SocialParams(sigma_xi=0.5)
    r1, r2 = Rng(4), Rng(4)
    t1 = social_terms(a, [a], [], noisy, 0.0, r1)
    t2 = social_terms(a, [a], [], noisy, 0.0, r2)
    assert t1 == t2 and t1["fluctuation"] != Vec2(0, 0)
    r3 = Rng(4)
    assert social_terms(a, [a], [], P, 0.0, r3)["fluctuation"] == Vec2(0, 0)
    # noise off leaves the stream untouched
    assert r3.uniform() == Rng(4).uniform()
    with pytest.raises(ValueError):
        social_terms(a, [a], [], noisy, 0.0, None)
