"""YAML scenario files.

Schema (optional keys shown with their defaults)::

    name: corridor                 # optional label
    model: social                  # cellular | magnetic | social
    seed: 0                        # 64-bit unsigned
    dt: 0.05                       # s, continuous models
    max_time: 60.0                 # s
    arrival_tolerance: 0.3         # m
    bounds: [xmin, ymin, xmax, ymax]
    params:                        # every block and key optional
      cellular: {K: 10.0, alpha_c: 0.7, beta_c: 0.5, field_radius: 2.5, cell_size: 0.5, tick: 0.5}
      magnetic: {k_coulomb: 1.0, goal_charge: -20.0, beta_max: 1.3962634, r_min: 0.2, avoid_radius: 3.0}
      social:   {tau: 0.5, A: 2.0, B: 0.3, sigma_xi: 0.0, wall_A: 10.0, wall_B: 0.2}
    agents:
      - id: 0
        position: [x, y]
        destination: [x, y]
        target_time: 7.5
        velocity: [0.0, 0.0]
        radius: 0.25
        mass: 1.0
        charge: 1.0
        v_max: 1.5
        v_min: 0.0
    obstacles:                     # same layout for walls
      - vertices: [[x, y], [x, y], ...]
        charge: 1.0
    walls: []
    regions:                       # named measurement regions
      door: gate:10,3.5,10,4.5
      room: area:0,0,10,8

Unknown keys are rejected unless ``allow_unknown`` is set. Every error is a
:class:`ValidationError` whose locus names the file, line and field.
"""

from __future__ import annotations

import dataclasses
import logging
import re
from typing import Any, Optional

import yaml

from .errors import ValidationError
from .geometry import Vec2
from .metrics import MeasureRegion
from .params import CellularParams, MagneticParams, ModelParams, SocialParams
from .scene import Agent, Bounds, Obstacle, Scenario

log = logging.getLogger(__name__)

TOP_KEYS = ("name", "model", "seed", "dt", "max_time", "arrival_tolerance", "bounds",
            "params", "agents", "obstacles", "walls", "regions")
AGENT_KEYS = ("id", "position", "destination", "target_time", "velocity", "radius",
              "mass", "charge", "v_max", "v_min")
OBSTACLE_KEYS = ("vertices", "charge")
PARAM_TYPES = {"cellular": CellularParams, "magnetic": MagneticParams, "social": SocialParams}


class _Map(dict):
    line: int = 0
    key_lines: dict

    def line_of(self, key: str) -> int:
        return self.key_lines.get(key, self.line)


class _Seq(list):
    line: int = 0
    item_lines: list


class _Loader(yaml.SafeLoader):
    pass


def _construct_map(loader: _Loader, node: yaml.MappingNode) -> _Map:
    loader.flatten_mapping(node)
    out = _Map()
    out.line = node.start_mark.line + 1
    out.key_lines = {}
    for knode, vnode in node.value:
        key = loader.construct_object(knode, deep=True)
        kline = knode.start_mark.line + 1
        if key in out:
            raise ValidationError("duplicate_key", f"duplicate key {key!r}", f"line {kline}")
        out[key] = loader.construct_object(vnode, deep=True)
        out.key_lines[key] = kline
    return out


def _construct_seq(loader: _Loader, node: yaml.SequenceNode) -> _Seq:
    out = _Seq(loader.construct_object(n, deep=True) for n in node.value)
    out.line = node.start_mark.line + 1
    out.item_lines = [n.start_mark.line + 1 for n in node.value]
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)
_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _construct_seq)


class _Reader:
    def __init__(self, source: str, allow_unknown: bool) -> None:
        self.source = source
        self.allow_unknown = allow_unknown

    def fail(self, code: str, message: str, line: int, field: str) -> ValidationError:
        return ValidationError(code, message, f"{self.source}:{line}: {field}")

    def mapping(self, value: Any, line: int, field: str, allowed: tuple[str, ...]) -> _Map:
        if not isinstance(value, dict):
            raise self.fail("bad_type", "expected a mapping", line, field)
        for key in value:
            if key not in allowed:
                if self.allow_unknown:
                    log.warning("%s:%d: ignoring unknown key %s.%s", self.source,
                                value.line_of(key), field, key)
                    continue
                raise self.fail("unknown_key", f"unknown key {key!r}", value.line_of(key),
                                f"{field}.{key}" if field else str(key))
        return value

    def real(self, value: Any, line: int, field: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail("bad_type", f"expected a number, got {value!r}", line, field)
        return float(value)

    def integer(self, value: Any, line: int, field: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail("bad_type", f"expected an integer, got {value!r}", line, field)
        return value

    def vec(self, value: Any, line: int, field: str) -> Vec2:
        if not isinstance(value, list) or len(value) != 2:
            raise self.fail("bad_type", "expected [x, y]", line, field)
        return Vec2(self.real(value[0], line, field), self.real(value[1], line, field))

    def seq(self, value: Any, line: int, field: str) -> _Seq:
        if not isinstance(value, list):
            raise self.fail("bad_type", "expected a list", line, field)
        return value

    def agent(self, m: Any, line: int, field: str) -> Agent:
        m = self.mapping(m, line, field, AGENT_KEYS)
        for key in ("id", "position", "destination", "target_time"):
            if key not in m:
                raise self.fail("missing_key", f"missing {key!r}", m.line, f"{field}.{key}")
        kw: dict[str, Any] = {"id": self.integer(m["id"], m.line_of("id"), f"{field}.id")}
        for key in ("position", "destination", "velocity"):
            if key in m:
                kw[key] = self.vec(m[key], m.line_of(key), f"{field}.{key}")
        for key in ("target_time", "radius", "mass", "charge", "v_max", "v_min"):
            if key in m:
                kw[key] = self.real(m[key], m.line_of(key), f"{field}.{key}")
        return Agent(**kw)

    def obstacle(self, m: Any, line: int, field: str) -> Obstacle:
        m = self.mapping(m, line, field, OBSTACLE_KEYS)
        if "vertices" not in m:
            raise self.fail("missing_key", "missing 'vertices'", m.line, f"{field}.vertices")
        verts = self.seq(m["vertices"], m.line_of("vertices"), f"{field}.vertices")
        lines = getattr(verts, "item_lines", [m.line] * len(verts))
        vertices = tuple(self.vec(v, ln, f"{field}.vertices[{i}]")
                         for i, (v, ln) in enumerate(zip(verts, lines)))
        kw: dict[str, Any] = {"vertices": vertices}
        if "charge" in m:
            kw["charge"] = self.real(m["charge"], m.line_of("charge"), f"{field}.charge")
        return Obstacle(**kw)

    def params(self, m: Any, line: int) -> ModelParams:
        m = self.mapping(m, line, "params", tuple(PARAM_TYPES))
        blocks = {}
        for name, cls in PARAM_TYPES.items():
            if name not in m:
                blocks[name] = cls()
                continue
            names = tuple(f.name for f in dataclasses.fields(cls))
            block = self.mapping(m[name], m.line_of(name), f"params.{name}", names)
            kw = {k: self.real(v, block.line_of(k), f"params.{name}.{k}")
                  for k, v in block.items() if k in names}
            blocks[name] = cls(**kw)
        return ModelParams(**blocks)


def parse_scenario(data: bytes | str, source: str = "<scenario>",
                   allow_unknown: bool = False) -> Scenario:
    """Parse and fully validate a scenario document."""
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    except UnicodeDecodeError as exc:
        raise ValidationError("bad_encoding", f"not UTF-8: {exc}", source) from None
    try:
        doc = yaml.load(text, Loader=_Loader)
    except ValidationError as exc:
        raise ValidationError(exc.code, exc.message,
                              f"{source}:{exc.locus.removeprefix('line ')}") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 0
        raise ValidationError("syntax_error", str(getattr(exc, "problem", exc)),
                              f"{source}:{line}") from None
    rd = _Reader(source, allow_unknown)
    doc = rd.mapping(doc, 1, "", TOP_KEYS)
    if "bounds" not in doc:
        raise rd.fail("missing_key", "missing 'bounds'", doc.line, "bounds")

    bline = doc.line_of("bounds")
    braw = rd.seq(doc["bounds"], bline, "bounds")
    if len(braw) != 4:
        raise rd.fail("bad_type", "bounds must be [xmin, ymin, xmax, ymax]", bline, "bounds")
    bounds = Bounds(*(rd.real(v, bline, "bounds") for v in braw))

    kw: dict[str, Any] = {"bounds": bounds}
    if "name" in doc:
        kw["name"] = str(doc["name"])
    if "model" in doc:
        kw["model"] = doc["model"]
    if "seed" in doc:
        kw["seed"] = rd.integer(doc["seed"], doc.line_of("seed"), "seed")
    for key in ("dt", "max_time", "arrival_tolerance"):
        if key in doc:
            kw[key] = rd.real(doc[key], doc.line_of(key), key)
    if "params" in doc:
        kw["params"] = rd.params(doc["params"], doc.line_of("params"))

    agent_lines: dict[int, int] = {}
    agents = []
    if "agents" in doc:
        raw = rd.seq(doc["agents"], doc.line_of("agents"), "agents")
        for i, (item, ln) in enumerate(zip(raw, raw.item_lines)):
            a = rd.agent(item, ln, f"agents[{i}]")
            if a.id in agent_lines:
                raise rd.fail("duplicate_agent_id",
                              f"duplicate agent id {a.id} (first at line {agent_lines[a.id]})",
                              ln, f"agents[id={a.id}]")
            agent_lines[a.id] = ln
            agents.append(a)
    kw["agents"] = agents
    for key in ("obstacles", "walls"):
        if key in doc:
            raw = rd.seq(doc[key], doc.line_of(key), key)
            kw[key] = [rd.obstacle(item, ln, f"{key}[{i}]")
                       for i, (item, ln) in enumerate(zip(raw, raw.item_lines))]
    if "regions" in doc:
        rmap = rd.mapping(doc["regions"], doc.line_of("regions"), "regions",
                          tuple(doc["regions"]) if isinstance(doc["regions"], dict) else ())
        regions = {}
        for name, spec in rmap.items():
            try:
                regions[str(name)] = MeasureRegion.parse(str(spec))
            except ValidationError as exc:
                raise rd.fail(exc.code, exc.message, rmap.line_of(name), f"regions.{name}") from None
        kw["regions"] = regions

    scenario = Scenario(**kw)
    try:
        scenario.validate()
    except ValidationError as exc:
        line = _line_for(exc.locus, doc, agent_lines)
        raise ValidationError(exc.code, exc.message,
                              f"{source}:{line}: {exc.locus}") from None
    return scenario


def _line_for(locus: str, doc: _Map, agent_lines: dict[int, int]) -> int:
    m = re.match(r"agents\[id=(\d+)\]", locus)
    if m:
        return agent_lines.get(int(m.group(1)), doc.line_of("agents"))
    m = re.match(r"(obstacles|walls)\[(\d+)\]", locus)
    if m and m.group(1) in doc:
        items = doc[m.group(1)]
        idx = int(m.group(2))
        if idx < len(getattr(items, "item_lines", [])):
            return items.item_lines[idx]
    head = locus.split(".", 1)[0]
    return doc.line_of(head) if head in doc else doc.line


def _vec(v: Vec2) -> list[float]:
    return [float(v.x), float(v.y)]


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    if s.name is not None:
        doc["name"] = s.name
    doc.update({
        "model": s.model,
        "seed": s.seed,
        "dt": float(s.dt),
        "max_time": float(s.max_time),
        "arrival_tolerance": float(s.arrival_tolerance),
        "bounds": [float(s.bounds.xmin), float(s.bounds.ymin), float(s.bounds.xmax), float(s.bounds.ymax)],
        "params": {name: {k: float(v) for k, v in dataclasses.asdict(getattr(s.params, name)).items()}
                   for name in PARAM_TYPES},
        "agents": [{
            "id": a.id,
            "position": _vec(a.position),
            "destination": _vec(a.destination),
            "target_time": float(a.target_time),
            "velocity": _vec(a.velocity),
            "radius": float(a.radius),
            "mass": float(a.mass),
            "charge": float(a.charge),
            "v_max": float(a.v_max),
            "v_min": float(a.v_min),
        } for a in s.agents],
        "obstacles": [{"vertices": [_vec(v) for v in o.vertices], "charge": float(o.charge)}
                      for o in s.obstacles],
        "walls": [{"vertices": [_vec(v) for v in o.vertices], "charge": float(o.charge)}
                  for o in s.walls],
        "regions": {name: r.spec() for name, r in s.regions.items()},
    })
    return doc


def serialize_scenario(s: Scenario) -> str:
    """Canonical text: every field written out, fixed key order."""
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False, default_flow_style=None, width=120)


def load_scenario(path: str, allow_unknown: bool = False) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read(), source=path, allow_unknown=allow_unknown)


def with_overrides(s: Scenario, model: Optional[str] = None, seed: Optional[int] = None) -> Scenario:
    changes: dict[str, Any] = {}
    if model is not None:
        changes["model"] = model
    if seed is not None:
        changes["seed"] = seed
    out = dataclasses.replace(s, **changes)
    out.validate()
    return out

