import json
import subprocess
import sys

import pytest

from hddthresh.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, run


def _load(path):
    doc = json.loads(path.read_text())
    doc.pop("run_info")
    return doc


def test_capacity_csv(tmp_path):
    assert run(["capacity", "--nu", "8..10", "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    lines = (tmp_path / "capacity.csv").read_text().splitlines()
    assert lines[0].startswith("# hddthresh")
    assert lines[1].startswith("# config:")
    assert lines[2].startswith("t,nu,n") and len(lines) == 6


def test_simulate_is_byte_reproducible(tmp_path):
    args = ["simulate", "--m", "200", "--p", "0.03", "--max-iters", "10", "--seed", "4", "--quiet",
            "--out", str(tmp_path)]
    assert run(args) == EXIT_OK
    first = {name: (tmp_path / name).read_bytes() for name in ("sim_trace.csv", "sim_trace.meta.json")}
    doc = _load(tmp_path / "simulate.json")
    assert run(args) == EXIT_OK
    for name, data in first.items():
        assert (tmp_path / name).read_bytes() == data
    assert _load(tmp_path / "simulate.json") == doc


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HDDTHRESH_OUT", str(tmp_path))
    assert run(["capacity", "--nu", "8..8", "--quiet", "--format", "json"]) == EXIT_OK
    assert (tmp_path / "capacity.json").exists()


def test_bad_command_and_design_mismatch(tmp_path):
    assert run(["frobnicate"]) == EXIT_CONFIG
    assert run(["threshold", "--nu", "4", "--t", "3", "--out", str(tmp_path), "--quiet"]) == EXIT_CONFIG


def test_numerical_error_exit_code(tmp_path):
    # with no iterations allowed nothing converges, so the bracket cannot be formed
    code = run(["scaled-threshold", "--L", "20", "--w", "2", "--max-iters", "0", "--out", str(tmp_path), "--quiet"])
    assert code == EXIT_NUMERIC


def test_config_rerun_matches(tmp_path):
    first = tmp_path / "first"
    args = ["scaled-threshold", "--t", "3", "--variant", "none", "--L", "65", "--w", "4", "--tol", "1e-3",
            "--out", str(first), "--quiet"]
    assert run(args) == EXIT_OK
    second = tmp_path / "second"
    assert run(["scaled-threshold", "--config", str(first / "scaled_threshold.json"), "--out", str(second),
                "--quiet"]) == EXIT_OK
    a, b = _load(first / "scaled_threshold.json"), _load(second / "scaled_threshold.json")
    a["config"].pop("out"), b["config"].pop("out")
    assert a == b
    assert a["result"]["variant"] == "no_miscorrection"


def test_threshold_and_potential_commands(tmp_path):
    out = str(tmp_path)
    assert run(["threshold", "--nu", "5", "--t", "2", "--uncoupled", "--out", out, "--quiet"]) == EXIT_OK
    res = json.loads((tmp_path / "threshold.json").read_text())["result"]
    assert 0 < res["p_star"] < 0.2
    assert run(["potential", "--t", "3", "--points", "11", "--out", out, "--quiet"]) == EXIT_OK
    assert run(["de-trace", "--rho", "5", "--L", "10", "--w", "2", "--max-iters", "5", "--out", out,
                "--quiet"]) == EXIT_OK
    assert (tmp_path / "de_trace.csv").exists()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hddthresh.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hddthresh" in proc.stdout
