import dataclasses
import math

import pytest

from micropeds import (Agent, Bounds, ModelParams, SimulationAborted, SocialParams, Vec2, clamp_speed,
                       fixture_path, init_state, load_scenario, run, step, write_trajectory)
from micropeds.engine import n_steps, project_out
from micropeds.geometry import distance
from micropeds.scene import Obstacle, Scenario

from conftest import corridor


def open_scene(agents, model="social", **kw):
    return Scenario(agents=agents, bounds=Bounds(0, 0, 20, 20), model=model, **kw)


def test_zero_agents_only_advance_time():
    s = open_scene([])
    state = init_state(s)
    step(state, s)
    assert state.time == s.dt and state.trajectory == []
    traj, summary = run(s)
    assert traj == [] and summary.steps == 0 and summary.all_arrived


def test_lone_agent_at_intended_velocity_advances_v0_dt():
    a = Agent(0, Vec2(2.25, 5.0), Vec2(12.25, 5.0), 10.0, velocity=Vec2(1.0, 0))
    s = open_scene([a])
    state = init_state(s)
    step(state, s)
    moved = state.agents[0]
    assert moved.position == Vec2(2.25 + 1.0 * s.dt, 5.0)
    assert moved.velocity == Vec2(1.0, 0)


def test_agent_within_tolerance_arrives_without_moving():
    a = Agent(0, Vec2(5, 5), Vec2(5.2, 5), 10.0, velocity=Vec2(1, 0))
    s = open_scene([a])
    traj, summary = run(s)
    assert summary.arrival_times == {0: s.dt} and summary.steps == 1
    assert [r.position for r in traj] == [Vec2(5, 5), Vec2(5, 5)]
    assert traj[-1].velocity == Vec2(0, 0)


@pytest.mark.parametrize("v,cap,expected", [
    ((0.3, 0.4), 2.0, (0.3, 0.4)),
    ((3, 4), 2.5, (1.5, 2.0)),
    ((0, 0), 1.0, (0, 0)),
])
def test_clamp_speed(v, cap, expected):
    assert clamp_speed(Vec2(*v), cap) == Vec2(*expected)


@pytest.mark.parametrize("model", ["cellular", "magnetic", "social"])
def test_timeout(model):
    s = dataclasses.replace(corridor(model), max_time=1.0 if model == "cellular" else 0.1)
    traj, summary = run(s)
    assert summary.arrival_times == {0: None}
    assert summary.end_time == pytest.approx(s.max_time)
    assert summary.steps == n_steps(s)


@pytest.mark.parametrize("model", ["cellular", "magnetic", "social"])
def test_records_and_arrival(model):
    s = corridor(model)
    traj, summary = run(s)
    t_arr = summary.arrival_times[0]
    assert t_arr is not None and traj[-1].time == t_arr
    times = [r.time for r in traj]
    assert times == [k * s.time_step for k in range(len(times))]
    final = traj[-1].position
    assert distance(final, s.agents[0].destination) <= s.arrival_tolerance
    # the input scenario is not mutated
    assert s.agents[0].position == Vec2(2.25, 2.25) and not s.agents[0].arrived


# Each model tuned to cruise near 1.33 m/s: 0.5 m cells every 0.375 s, a
# goal pole of -40, and the social default of 10 m in 7.5 s.
CRUISE_133 = {
    "cellular": {"cellular": {"tick": 0.375}},
    "magnetic": {"magnetic": {"goal_charge": -40.0}},
    "social": {},
}


@pytest.mark.parametrize("model", ["cellular", "magnetic", "social"])
def test_lone_agent_arrival_time_bounds(model):
    s = corridor(model)
    blocks = {name: dataclasses.replace(getattr(s.params, name), **kw)
              for name, kw in CRUISE_133[model].items()}
    s = dataclasses.replace(s, params=dataclasses.replace(s.params, **blocks))
    t_arr = run(s)[1].arrival_times[0]
    # distance over the speed cap is a hard floor; 10 m at 1.33 m/s is 7.5 s
    floor = (10.0 - s.arrival_tolerance) / s.agents[0].v_max
    assert floor <= t_arr
    assert 6.0 <= t_arr <= 9.0


def test_cellular_positions_are_cell_centers():
    s = corridor("cellular")
    traj, _ = run(s)
    h = s.params.cellular.cell_size
    for r in traj:
        for c in r.position:
            assert (c / h - 0.5) == round(c / h - 0.5)


def test_determinism_with_noise():
    s = load_scenario(str(fixture_path("counterflow")))
    assert s.params.social.sigma_xi > 0
    s = dataclasses.replace(s, max_time=5.0)
    assert write_trajectory(run(s)[0]) == write_trajectory(run(s)[0])
    other = dataclasses.replace(s, seed=s.seed + 1)
    assert write_trajectory(run(other)[0]) != write_trajectory(run(s)[0])


def _bottleneck(model, n=20, max_time=20.0):
    s = load_scenario(str(fixture_path("bottleneck")))
    return dataclasses.replace(s, model=model, agents=s.agents[:n], max_time=max_time)


@pytest.mark.parametrize("model", ["magnetic", "social"])
def test_no_wall_penetration_and_speed_cap(model):
    s = _bottleneck(model)
    traj, _ = run(s)
    radius = {a.id: a.radius for a in s.agents}
    v_max = {a.id: a.v_max for a in s.agents}
    for r in traj:
        assert r.speed <= v_max[r.agent_id] * (1 + 1e-12)
        for o in s.all_obstacles:
            assert distance(r.position, o.nearest_point(r.position)) >= radius[r.agent_id] - 1e-6


def test_project_out_restores_clearance():
    wall = Obstacle((Vec2(0, 0), Vec2(10, 0)))
    pos, vel = project_out(Vec2(5, 0.1), Vec2(1, -1), 0.25, [wall], Vec2(5, 0.3))
    assert pos == Vec2(5, 0.25) and vel == Vec2(1, 0)
    corner = [wall, Obstacle((Vec2(0, 0), Vec2(0, 10)))]
    pos, _ = project_out(Vec2(0.1, 0.1), Vec2(0, 0), 0.25, corner, Vec2(0.3, 0.3))
    assert all(distance(pos, o.nearest_point(pos)) >= 0.25 - 1e-9 for o in corner)


def test_non_finite_force_aborts_with_diagnostic():
    a = Agent(0, Vec2(5, 5), Vec2(15, 5), 10.0)
    b = Agent(1, Vec2(5.01, 5), Vec2(15, 5), 10.0)
    s = open_scene([a, b], params=ModelParams(social=SocialParams(A=1e308, B=0.01)))
    with pytest.raises(SimulationAborted) as info:
        run(s)
    assert info.value.agent_id == 0 and "pedestrians" in str(info.value)


def test_validation_runs_before_stepping():
    s = open_scene([Agent(0, Vec2(50, 50), Vec2(1, 1), 1.0)])
    with pytest.raises(ValueError):
        run(s)


def test_progress_callback():
    seen = []
    run(corridor("social"), progress=lambda st: seen.append(st.steps), every=10)
    assert seen and all(k % 10 == 0 for k in seen)
