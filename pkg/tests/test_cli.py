import json
import subprocess
import sys

import pytest

from micropeds import fixture_path, read_trajectory, run
from micropeds.calibrate import apply_params
from micropeds.cli import main
from micropeds.scenario_file import load_scenario
from micropeds.trajectory import write_trajectory

CORRIDOR = str(fixture_path("corridor"))


def test_simulate_smoke(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--scenario", CORRIDOR, "--out", str(out)]) == 0
    records = read_trajectory(out.read_bytes())
    assert records and records[0].time == 0.0


@pytest.mark.parametrize("model", ["cellular", "magnetic"])
def test_simulate_model_override(tmp_path, model):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--scenario", CORRIDOR, "--out", str(out), "--model", model, "--seed", "4"]) == 0
    times = sorted({r.time for r in read_trajectory(out.read_bytes())})
    assert (times[1] == 0.5) == (model == "cellular")


def test_missing_scenario(tmp_path, capsys):
    missing = tmp_path / "nope.yaml"
    assert main(["simulate", "--scenario", str(missing), "--out", str(tmp_path / "t.csv")]) == 1
    assert str(missing) in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["simulate", "--scenario", CORRIDOR, "--out", "x.csv", "--turbo"]) == 1
    err = capsys.readouterr().err
    assert "usage:" in err and "--turbo" in err


def test_no_command(capsys):
    assert main([]) == 1
    assert "usage:" in capsys.readouterr().err


def test_invalid_scenario_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(fixture_path("corridor").read_text().replace("max_time: 30.0", "max_time: -3"))
    assert main(["simulate", "--scenario", str(bad), "--out", str(tmp_path / "t.csv")]) == 1
    assert f"{bad}:6: max_time" in capsys.readouterr().err


def test_abort_exit_2(tmp_path, capsys):
    text = fixture_path("column").read_text().replace(
        "params:\n", "params:\n  social: {A: 1.0e+308, B: 1000.0}\n", 1)
    scen = tmp_path / "boom.yaml"
    scen.write_text(text)
    assert main(["simulate", "--scenario", str(scen), "--out", str(tmp_path / "t.csv")]) == 2
    assert "aborted" in capsys.readouterr().err


def test_simulate_is_byte_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"t{k}.csv"
        assert main(["simulate", "--scenario", str(fixture_path("counterflow")), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_compare_bottleneck(tmp_path, capsys):
    assert main(["compare", "--scenario", str(fixture_path("bottleneck")), "--out-dir", str(tmp_path)]) == 0
    for model in ("cellular", "magnetic", "social"):
        assert read_trajectory((tmp_path / f"trajectory_{model}.csv").read_bytes())
    table = (tmp_path / "compare.csv").read_text()
    assert table == capsys.readouterr().out
    header, *rows = table.splitlines()
    cols = header.split(",")
    assert "queuing" in cols and len(rows) == 3
    for row in rows:
        assert row.split(",")[cols.index("queuing")] in ("yes", "no")


def test_metrics(tmp_path, capsys):
    out = tmp_path / "t.csv"
    main(["simulate", "--scenario", CORRIDOR, "--out", str(out)])
    capsys.readouterr()
    rc = main(["metrics", "--trajectory", str(out), "--region", "gate:8,0,8,4",
               "--region", "area:0,0,5,4", "--time", "1.0", "--v-max", "1.5"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "region,metric,value"
    assert '"gate:8.0,0.0,8.0,4.0",gross_crossings,1' in lines
    assert any(line.startswith('"area:0.0,0.0,5.0,4.0",density,') for line in lines)
    assert lines[-1].startswith("*,queue,")


@pytest.mark.parametrize("args", [
    ["--region", "zone:1,2,3,4"],
    ["--region", "gate:8,0,8,4", "--window", "0"],
    ["--region", "area:0,0,5,4", "--time", "1e6"],
])
def test_metrics_bad_input(tmp_path, args):
    out = tmp_path / "t.csv"
    main(["simulate", "--scenario", CORRIDOR, "--out", str(out)])
    assert main(["metrics", "--trajectory", str(out), *args]) == 1


def test_calibrate(tmp_path):
    scenario = load_scenario(CORRIDOR)
    ref, _ = run(apply_params(scenario, {"tau": 0.8}))
    ref_path = tmp_path / "ref.csv"
    ref_path.write_bytes(write_trajectory(ref))
    grid = tmp_path / "grid.yaml"
    grid.write_text("tau: [0.3, 0.8, 1.5]\n")
    out = tmp_path / "fit.csv"
    assert main(["calibrate", "--scenario", CORRIDOR, "--ref", str(ref_path), "--grid", str(grid),
                 "--out", str(out)]) == 0
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["best_params"] == {"tau": 0.8} and summary["best_error"] == 0.0
    assert out.read_text().splitlines()[0] == "tau,position_rmse,velocity_rmse,holdout_rmse"


def test_calibrate_bad_grid(tmp_path):
    grid = tmp_path / "grid.yaml"
    grid.write_text("tau: fast\n")
    ref = tmp_path / "ref.csv"
    ref.write_bytes(write_trajectory([]))
    assert main(["calibrate", "--scenario", CORRIDOR, "--ref", str(ref), "--grid", str(grid),
                 "--out", str(tmp_path / "o.csv")]) == 1


def test_console_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    proc = subprocess.run([sys.executable, "-m", "micropeds.cli", "simulate", "--scenario", CORRIDOR,
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and out.exists()
