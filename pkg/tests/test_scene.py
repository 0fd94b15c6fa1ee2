import dataclasses
import math

import pytest

from micropeds import Agent, Bounds, MeasureRegion, ModelParams, Obstacle, Scenario, ValidationError, Vec2
from micropeds.params import CellularParams, MagneticParams, SocialParams


def agent(**kw):
    base = dict(id=0, position=Vec2(1, 1), destination=Vec2(5, 1), target_time=5.0)
    base.update(kw)
    return Agent(**base)


def scenario(**kw):
    base = dict(agents=[agent()], bounds=Bounds(0, 0, 10, 10))
    base.update(kw)
    return Scenario(**base)


def code_of(s):
    with pytest.raises(ValidationError) as info:
        s.validate()
    return info.value.code


def test_valid_scenario_passes():
    scenario().validate()


AGENT_CASES = [
    (dict(id=-1), "bad_agent_id"),
    (dict(position=Vec2(math.nan, 0)), "non_finite"),
    (dict(target_time=0.0), "bad_target_time"),
    (dict(radius=0.0), "bad_radius"),
    (dict(mass=-1.0), "bad_mass"),
    (dict(charge=0.0), "bad_charge"),
    (dict(v_max=0.0), "bad_v_max"),
    (dict(v_min=-0.1), "bad_v_min"),
    (dict(v_min=2.0, v_max=1.0), "v_min_above_v_max"),
]


@pytest.mark.parametrize("changes,code", AGENT_CASES)
def test_agent_violations(changes, code):
    assert code_of(scenario(agents=[agent(**changes)])) == code


SCENARIO_CASES = [
    (dict(bounds=Bounds(0, 0, 0, 10)), "bad_bounds"),
    (dict(model="fluid"), "unknown_model"),
    (dict(dt=0.0), "bad_dt"),
    (dict(max_time=-1.0), "bad_max_time"),
    (dict(dt=1.0, max_time=1.0), "dt_not_below_max_time"),
    (dict(seed=-1), "bad_seed"),
    (dict(seed=2**64), "bad_seed"),
    (dict(arrival_tolerance=0.0), "bad_arrival_tolerance"),
    (dict(agents=[agent(), agent()]), "duplicate_agent_id"),
    (dict(agents=[agent(position=Vec2(11, 1))]), "agent_out_of_bounds"),
    (dict(obstacles=[Obstacle((Vec2(1, 1),))]), "too_few_vertices"),
    (dict(obstacles=[Obstacle((Vec2(1, 1), Vec2(1, 1)))]), "repeated_vertex"),
    (dict(walls=[Obstacle((Vec2(1, 1), Vec2(2, 1)), charge=-1.0)]), "bad_charge"),
    (dict(params=ModelParams(social=SocialParams(tau=0.0))), "invalid_param"),
    (dict(regions={"r": MeasureRegion.area(0, 0, 0, 1)}), "bad_region"),
]


@pytest.mark.parametrize("changes,code", SCENARIO_CASES)
def test_scenario_violations(changes, code):
    assert code_of(scenario(**changes)) == code


def test_violation_codes_are_distinct():
    # Each listed invariant has its own code; non_finite covers all NaN/Inf inputs.
    codes = [c for _, c in AGENT_CASES + SCENARIO_CASES]
    assert len(set(codes)) == len(codes) - 2  # bad_seed and bad_charge appear twice


def test_duplicate_id_locus_names_the_id():
    with pytest.raises(ValidationError) as info:
        scenario(agents=[agent(id=7), agent(id=7)]).validate()
    assert "7" in str(info.value) and "agents[id=7]" in info.value.locus


@pytest.mark.parametrize("params,name", [
    (CellularParams(beta_c=0.0), "beta_c"),
    (CellularParams(field_radius=0.25), "field_radius"),
    (MagneticParams(goal_charge=1.0), "goal_charge"),
    (MagneticParams(beta_max=math.pi / 2), "beta_max"),
    (MagneticParams(r_min=0.0), "r_min"),
    (SocialParams(B=0.0), "B"),
    (SocialParams(wall_B=0.0), "wall_B"),
    (SocialParams(sigma_xi=-1.0), "sigma_xi"),
])
def test_param_violations_name_the_field(params, name):
    with pytest.raises(ValidationError) as info:
        params.validate()
    assert info.value.locus == name


def test_time_step_follows_model():
    s = scenario(model="cellular")
    assert s.time_step == s.params.cellular.tick
    assert dataclasses.replace(s, model="social").time_step == s.dt
