"""Microscopic pedestrian simulation with three interchangeable models."""

from pathlib import Path

from .engine import RunSummary, SimulationState, clamp_speed, init_state, run, step
from .errors import SimulationAborted, ValidationError
from .geometry import Vec2, distance
from .metrics import MeasureRegion
from .params import CellularParams, MagneticParams, ModelParams, SocialParams
from .scene import Agent, Bounds, Obstacle, Scenario
from .scenario_file import load_scenario, parse_scenario, serialize_scenario
from .trajectory import TrajectoryRecord, read_trajectory, write_trajectory

__version__ = "0.1.0"

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fixture_path(name: str) -> Path:
    """Path of a bundled scenario, e.g. ``fixture_path("bottleneck")``."""
    return FIXTURES / f"{name}.yaml"


__all__ = [
    "Agent", "Bounds", "CellularParams", "MagneticParams", "MeasureRegion", "ModelParams",
    "Obstacle", "RunSummary", "Scenario", "SimulationAborted", "SimulationState", "SocialParams",
    "TrajectoryRecord", "ValidationError", "Vec2", "clamp_speed", "distance", "fixture_path",
    "init_state", "load_scenario", "parse_scenario", "read_trajectory", "run", "serialize_scenario",
    "step", "write_trajectory",
]
