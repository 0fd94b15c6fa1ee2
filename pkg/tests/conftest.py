import math

import pytest

from micropeds import Agent, Bounds, Obstacle, Scenario, Vec2

CRITERIA: dict[int, str] = {}
RESULTS: dict[int, list[str]] = {}
DETAILS: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            CRITERIA[m.args[0]] = m.args[1]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        RESULTS.setdefault(m.args[0], []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        outcomes = RESULTS.get(n)
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {CRITERIA[n]}")
        for line in DETAILS.get(n, []):
            terminalreporter.write_line(f"              {line}")


@pytest.fixture
def report(request):
    """Attach a measured value to the acceptance summary line of this test."""
    m = request.node.get_closest_marker("criterion")
    n = m.args[0] if m else 0

    def add(text: str) -> None:
        DETAILS.setdefault(n, []).append(text)
    return add


def corridor(model="social", length=10.0, **kw):
    """Lone agent walking ``length`` m east in an open 20 x 4 m corridor."""
    agent = Agent(0, Vec2(2.25, 2.25), Vec2(2.25 + length, 2.25), kw.pop("target_time", 7.5))
    defaults = dict(max_time=30.0, seed=1,
                    walls=[Obstacle((Vec2(0, 0), Vec2(20, 0))), Obstacle((Vec2(0, 4), Vec2(20, 4)))])
    defaults.update(kw)
    return Scenario(agents=[agent], bounds=Bounds(0, 0, 20, 4), model=model, **defaults)


def close(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
