"""Constant sets for the three models.

Defaults are engineering choices; none of them is a measured value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import ValidationError


def _require(ok: bool, name: str, message: str) -> None:
    if not ok:
        raise ValidationError("invalid_param", message, name)


@dataclass(frozen=True)
class CellularParams:
    K: float = 10.0
    alpha_c: float = 0.7
    beta_c: float = 0.5
    field_radius: float = 2.5
    cell_size: float = 0.5
    tick: float = 0.5

    def validate(self) -> None:
        for f in fields(self):
            _require(math.isfinite(getattr(self, f.name)), f.name, "must be finite")
        _require(self.K > 0, "K", "must be > 0")
        _require(self.alpha_c >= 0, "alpha_c", "must be >= 0")
        _require(self.beta_c > 0, "beta_c", "must be > 0")
        _require(self.field_radius > 0, "field_radius", "must be > 0")
        _require(self.cell_size > 0, "cell_size", "must be > 0")
        _require(self.tick > 0, "tick", "must be > 0")
        _require(self.field_radius >= self.cell_size, "field_radius",
                 "must be >= cell_size")


@dataclass(frozen=True)
class MagneticParams:
    k_coulomb: float = 1.0
    goal_charge: float = -20.0
    beta_max: float = math.radians(80.0)
    r_min: float = 0.2
    # Range of the avoidance term; beyond it nobody triggers an evasive turn.
    avoid_radius: float = 3.0

    def validate(self) -> None:
        for f in fields(self):
            _require(math.isfinite(getattr(self, f.name)), f.name, "must be finite")
        _require(self.k_coulomb > 0, "k_coulomb", "must be > 0")
        _require(self.goal_charge < 0, "goal_charge", "must be < 0 (negative pole)")
        _require(0 < self.beta_max < math.pi / 2, "beta_max", "must be in (0, pi/2)")
        _require(self.r_min > 0, "r_min", "must be > 0")
        _require(self.avoid_radius >= 0, "avoid_radius", "must be >= 0")


@dataclass(frozen=True)
class SocialParams:
    tau: float = 0.5
    A: float = 2.0
    B: float = 0.3
    sigma_xi: float = 0.0
    wall_A: float = 10.0
    wall_B: float = 0.2

    def validate(self) -> None:
        for f in fields(self):
            _require(math.isfinite(getattr(self, f.name)), f.name, "must be finite")
        _require(self.tau > 0, "tau", "must be > 0")
        _require(self.A >= 0, "A", "must be >= 0")
        _require(self.B > 0, "B", "must be > 0")
        _require(self.sigma_xi >= 0, "sigma_xi", "must be >= 0")
        _require(self.wall_A >= 0, "wall_A", "must be >= 0")
        _require(self.wall_B > 0, "wall_B", "must be > 0")


@dataclass(frozen=True)
class ModelParams:
    cellular: CellularParams = field(default_factory=CellularParams)
    magnetic: MagneticParams = field(default_factory=MagneticParams)
    social: SocialParams = field(default_factory=SocialParams)

    def validate(self) -> None:
        for name in ("cellular", "magnetic", "social"):
            try:
                getattr(self, name).validate()
            except ValidationError as exc:
                raise exc.at(f"params.{name}") from None

    def for_model(self, model: str):
        return getattr(self, model)
