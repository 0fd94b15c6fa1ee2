"""Regenerate the scenario fixtures shipped in src/micropeds/fixtures/."""

from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "micropeds" / "fixtures"


def num(v):
    return repr(float(v)) if not float(v).is_integer() else f"{float(v):.1f}"


def agent_line(aid, pos, dest, target_time, **extra):
    parts = [f"id: {aid}", f"position: [{num(pos[0])}, {num(pos[1])}]",
             f"destination: [{num(dest[0])}, {num(dest[1])}]", f"target_time: {num(target_time)}"]
    parts += [f"{k}: {num(v)}" for k, v in extra.items()]
    return "  - {" + ", ".join(parts) + "}"


def poly(vertices):
    pts = ", ".join(f"[{num(x)}, {num(y)}]" for x, y in vertices)
    return f"  - vertices: [{pts}]"


def document(header, agents, walls, obstacles=(), regions=None):
    lines = [header.strip(), "agents:"]
    lines += agents
    lines.append("walls:")
    lines += [poly(w) for w in walls]
    if obstacles:
        lines.append("obstacles:")
        lines += [poly(o) for o in obstacles]
    if regions:
        lines.append("regions:")
        lines += [f"  {k}: {v}" for k, v in regions.items()]
    return "\n".join(lines) + "\n"


def corridor():
    header = """
# Open 20 x 4 m corridor, one pedestrian walking 10 m east.
name: corridor
model: social
seed: 1
dt: 0.05
max_time: 30.0
arrival_tolerance: 0.3
bounds: [0.0, 0.0, 20.0, 4.0]
"""
    agents = [agent_line(0, (2.25, 2.25), (12.25, 2.25), 7.5)]
    walls = [[(0, 0), (20, 0)], [(0, 4), (20, 4)]]
    regions = {"finish": "gate:8.0,0.0,8.0,4.0"}
    return document(header, agents, walls, regions=regions)


def column():
    header = """
# Closed 20 x 4 m corridor narrowed by a 1 x 1 m column in the middle.
# Four lanes flank the column. Sixteen like charges packed this tightly
# need a strong goal pole to move off together.
name: column
model: social
seed: 2
dt: 0.05
max_time: 60.0
arrival_tolerance: 0.3
bounds: [0.0, 0.0, 20.0, 4.0]
params:
  magnetic: {goal_charge: -80.0}
"""
    agents = []
    aid = 0
    for x in (1.25, 2.25, 3.25, 4.25):
        for y in (0.75, 1.25, 2.75, 3.25):
            agents.append(agent_line(aid, (x, y), (18.25, y), 14.0))
            aid += 1
    walls = [[(0, 0), (20, 0)], [(0, 4), (20, 4)], [(0, 0), (0, 4)], [(20, 0), (20, 4)]]
    obstacles = [[(9.5, 1.5), (10.5, 1.5), (10.5, 2.5), (9.5, 2.5), (9.5, 1.5)]]
    regions = {"gate": "gate:10.0,0.0,10.0,4.0", "upstream": "area:7.0,0.0,9.5,4.0",
               "downstream": "area:10.5,0.0,13.0,4.0"}
    return document(header, agents, walls, obstacles, regions)


def bottleneck():
    header = """
# 10 x 8 m room drained through a 1 m door into a 6 m deep exit hall.
# Agent ids run column by column starting next to the door. A crowd of
# 40-50 like charges needs a goal pole stronger than the default to drain.
name: bottleneck
model: social
seed: 3
dt: 0.05
max_time: 150.0
arrival_tolerance: 0.3
bounds: [0.0, 0.0, 16.0, 8.0]
params:
  magnetic: {goal_charge: -40.0}
"""
    agents = []
    aid = 0
    for x in (7.25, 6.25, 5.25, 4.25, 3.25):
        for j in range(10):
            y = round(0.75 + 0.7 * j, 2)
            agents.append(agent_line(aid, (x, y), (12.25, 4.25), 10.0))
            aid += 1
    walls = [
        [(0, 0), (16, 0)], [(0, 8), (16, 8)], [(0, 0), (0, 8)],
        [(10, 0), (10, 3.5)], [(10, 4.5), (10, 8)],
    ]
    regions = {"room": "area:0.0,0.0,10.0,8.0", "upstream": "area:8.0,2.0,10.0,6.0",
               "downstream": "area:10.0,2.0,12.0,6.0", "door": "gate:10.0,3.5,10.0,4.5"}
    return document(header, agents, walls, regions=regions)


def room_evacuation():
    header = """
# Square 10 x 10 m room, 30 occupants leaving through a 1.2 m door.
name: room_evacuation
model: social
seed: 4
dt: 0.05
max_time: 120.0
arrival_tolerance: 0.3
bounds: [0.0, 0.0, 14.0, 10.0]
params:
  magnetic: {goal_charge: -80.0}
"""
    agents = []
    aid = 0
    for x in (1.75, 3.25, 4.75, 6.25, 7.75):
        for y in (1.25, 2.75, 4.25, 5.75, 7.25, 8.75):
            agents.append(agent_line(aid, (x, y), (13.25, 4.75), 12.0))
            aid += 1
    walls = [
        [(0, 0), (10, 0), (10, 4.2)], [(10, 5.4), (10, 10), (0, 10), (0, 0)],
        [(10, 0), (14, 0), (14, 10), (10, 10)],
    ]
    regions = {"room": "area:0.0,0.0,10.0,10.0", "door": "gate:10.0,4.2,10.0,5.4"}
    return document(header, agents, walls, regions=regions)


def counterflow():
    header = """
# Two groups crossing in a closed corridor; a demo for lane formation, not gated by tests.
name: counterflow
model: social
seed: 5
dt: 0.05
max_time: 40.0
arrival_tolerance: 0.3
bounds: [0.0, 0.0, 20.0, 4.0]
params:
  magnetic: {goal_charge: -80.0}
  social: {sigma_xi: 0.1}
"""
    agents = []
    aid = 0
    for x in (1.25, 2.75, 4.25):
        for y in (0.75, 1.75, 2.75, 3.25):
            agents.append(agent_line(aid, (x, y), (19.25, y), 16.0))
            aid += 1
    for x in (18.75, 17.25, 15.75):
        for y in (0.75, 1.25, 2.25, 3.25):
            agents.append(agent_line(aid, (x, y), (0.75, y), 16.0))
            aid += 1
    walls = [[(0, 0), (20, 0)], [(0, 4), (20, 4)], [(0, 0), (0, 4)], [(20, 0), (20, 4)]]
    regions = {"middle": "gate:10.0,0.0,10.0,4.0"}
    return document(header, agents, walls, regions=regions)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for fn in (corridor, column, bottleneck, room_evacuation, counterflow):
        (OUT / f"{fn.__name__}.yaml").write_text(fn())
        print("wrote", fn.__name__)
