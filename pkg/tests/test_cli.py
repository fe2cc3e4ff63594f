"""Command-line behavior: exit codes, file outputs, run-to-run stability."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import DIAGRAMS, FIXTURES

UAV = str(DIAGRAMS / "uav.codp")


def _read_all(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


# ---------------------------------------------------------------------------
# check


def test_check_reports_diagram_shape(run_cli, capsys):
    assert run_cli("check", UAV) == 0
    out = capsys.readouterr().out
    assert "ok: 5 nodes, 10 edges, 1 loops, 2 params, 2 queries" in out


def test_check_missing_file_is_usage_error(run_cli, capsys):
    assert run_cli("check", str(DIAGRAMS / "nope.codp")) == 64
    assert "no such file" in capsys.readouterr().err


def test_check_maps_error_classes_to_exit_codes(run_cli):
    paths = sorted((FIXTURES / "malformed").glob("*.codp"))
    assert len(paths) >= 16
    for path in paths:
        want = 1 if path.name.startswith("syntax_") else 2
        assert run_cli("check", str(path)) == want, path.name


def test_help_exits_cleanly(run_cli, capsys):
    assert run_cli("--help") == 0
    assert "codp" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# solve


FROZEN_SOLVE_DEFAULT = {
    "diagram": "uav.codp",
    "feasible": True,
    "functionality": {
        "chassis.payload": 1300.0,
        "task.distance": 600.0,
        "task.frequency": 0.004,
        "task.missions": 2000.0,
    },
    "minimal_resources": [
        {"chassis.lifetime_cost": 82.99251653252037,
         "chassis.self_weight": 210.16879820915875},
    ],
    "query": "default",
}

FROZEN_SOLVE_LIGHT_POINTS = [
    {"chassis.lifetime_cost": 55.487028396710166,
     "chassis.self_weight": 76.6378814472767},
    {"chassis.lifetime_cost": 50.73340022790278,
     "chassis.self_weight": 221.12671984398062},
]


def test_solve_default_query_frozen(run_cli, tmp_path):
    assert run_cli("solve", UAV, "--out", tmp_path,
                   "--format", "json,csv") == 0
    doc = json.loads((tmp_path / "solve_default.json").read_text())
    assert doc == FROZEN_SOLVE_DEFAULT
    csv = (tmp_path / "solve_default.csv").read_text()
    assert csv == ("chassis.self_weight,chassis.lifetime_cost\n"
                   "210.16879820915875,82.99251653252037\n")


def test_solve_named_query_frozen(run_cli, tmp_path):
    assert run_cli("solve", UAV, "--query", "light", "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "solve_light.json").read_text())
    assert doc["query"] == "light"
    assert doc["functionality"]["chassis.payload"] == 500.0
    assert doc["minimal_resources"] == FROZEN_SOLVE_LIGHT_POINTS
    assert not (tmp_path / "solve_light.csv").exists()  # json is the default


def test_solve_usage_errors(run_cli, tmp_path):
    assert run_cli("solve", UAV, "--query", "ghost", "--out", tmp_path) == 64
    # a valid diagram with no query declarations cannot be solved
    assert run_cli("solve", str(FIXTURES / "finite_chain.codp"),
                   "--out", tmp_path) == 64
    assert run_cli("solve", UAV, "--format", "yaml") == 64


def test_solve_is_deterministic_across_runs(run_cli, tmp_path):
    outs = []
    for i in range(3):
        out = tmp_path / f"run{i}"
        assert run_cli("solve", UAV, "--out", out,
                       "--format", "json,csv") == 0
        outs.append(_read_all(out))
    assert outs[0] == outs[1] == outs[2]


# ---------------------------------------------------------------------------
# uav front


def test_front_outputs_are_byte_identical(run_cli, tmp_path):
    outs = []
    for i in range(3):
        out = tmp_path / f"run{i}"
        assert run_cli("uav", "front", "--grid", "1200:1400:100",
                       "--tech", "NiMH", "--out", out) == 0
        outs.append(_read_all(out))
    assert outs[0] == outs[1] == outs[2]
    assert set(outs[0]) == {"front.csv", "front.json", "front.svg"}

    rows = json.loads(outs[0]["front.json"])
    assert [r["payload_g"] for r in rows] == [1200.0, 1300.0, 1400.0]
    assert all(r["feasible"] and r["tech"] == "NiMH" for r in rows)
    costs = [r["min_cost_usd"] for r in rows]
    assert costs == sorted(costs)  # more payload never costs less
    assert outs[0]["front.svg"].startswith(b"<svg")


def test_front_rejects_bad_arguments(run_cli, tmp_path):
    assert run_cli("uav", "front", "--tech", "vapor", "--out", tmp_path) == 64
    assert run_cli("uav", "front", "--grid", "abc", "--out", tmp_path) == 64
    assert run_cli("uav", "front", "--grid", "5:1:1", "--out", tmp_path) == 64
    assert run_cli("uav", "front", "--format", "png", "--out", tmp_path) == 64


# ---------------------------------------------------------------------------
# uav distribution


def test_distribution_usage_errors(run_cli, tmp_path):
    out = str(tmp_path)
    assert run_cli("uav", "distribution", "--tech", "NiMH",
                   "--payload", "1300") == 64  # --seed is mandatory
    assert run_cli("uav", "distribution", "--tech", "NiMH", "--tech", "LiPo",
                   "--payload", "1300", "--seed", "1", "--out", out) == 64
    assert run_cli("uav", "distribution", "--tech", "vapor",
                   "--payload", "1300", "--seed", "1", "--out", out) == 64
    # a nonsensical sample count is a value error, not a usage error
    assert run_cli("uav", "distribution", "--tech", "NiMH", "--payload",
                   "1300", "--n", "0", "--seed", "1", "--out", out) == 2


def test_threads_env_is_validated(run_cli, tmp_path, monkeypatch):
    args = ("uav", "distribution", "--tech", "NiMH", "--payload", "1300",
            "--n", "2", "--seed", "3", "--out", str(tmp_path))
    monkeypatch.setenv("CODP_THREADS", "zero")
    assert run_cli(*args) == 64
    monkeypatch.setenv("CODP_THREADS", "0")
    assert run_cli(*args) == 64


def test_distribution_outputs_ignore_thread_count(run_cli, tmp_path,
                                                  monkeypatch):
    outs = []
    for i, threads in enumerate(("1", "4", "4")):
        monkeypatch.setenv("CODP_THREADS", threads)
        out = tmp_path / f"run{i}"
        assert run_cli("uav", "distribution", "--tech", "NiMH",
                       "--payload", "1300", "--n", "24", "--seed", "7",
                       "--out", out) == 0
        outs.append(_read_all(out))
    assert outs[0] == outs[1] == outs[2]
    assert set(outs[0]) == {"distribution.csv", "distribution_summary.json",
                            "distribution.svg"}

    summary = json.loads(outs[0]["distribution_summary.json"])
    assert summary["tech"] == "NiMH"
    assert summary["n"] == 24
    assert summary["root_seed"] == 7

    lines = outs[0]["distribution.csv"].decode().splitlines()
    assert lines[0] == ("tech,payload_g,seed,feasible,"
                        "min_cost_usd,self_weight_g")
    assert len(lines) == 25


# ---------------------------------------------------------------------------
# uav sweep


def test_sweep_outputs_are_byte_identical(run_cli, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        assert run_cli("uav", "sweep", "--grid", "1300:1400:100",
                       "--tech", "NiMH", "--tech", "LiPo", "--n", "2",
                       "--seed", "5", "--deterministic", "--out", out,
                       "--format", "csv,json") == 0
        outs.append(_read_all(out))
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"sweep.csv", "sweep_summary.json"}

    lines = outs[0]["sweep.csv"].decode().splitlines()
    assert len(lines) == 1 + 2 * 2 * 2
    summaries = json.loads(outs[0]["sweep_summary.json"])
    assert [(s["tech"], s["payload_g"]) for s in summaries] == [
        ("LiPo", 1300.0), ("LiPo", 1400.0),
        ("NiMH", 1300.0), ("NiMH", 1400.0)]


def test_sweep_writes_one_svg_per_tech(run_cli, tmp_path):
    assert run_cli("uav", "sweep", "--grid", "1300:1300:50",
                   "--tech", "NiMH", "--tech", "LiPo", "--n", "2",
                   "--seed", "5", "--deterministic", "--out", tmp_path,
                   "--format", "svg") == 0
    assert (tmp_path / "sweep_NiMH.svg").exists()
    assert (tmp_path / "sweep_LiPo.svg").exists()


def test_sweep_requires_seed(run_cli, tmp_path):
    assert run_cli("uav", "sweep", "--grid", "1300:1300:50",
                   "--out", str(tmp_path)) == 64


# ---------------------------------------------------------------------------
# module entry point


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "codp.cli", "check", UAV],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "ok:" in proc.stdout
