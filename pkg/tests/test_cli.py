import json
import subprocess
import sys

import pytest

from occupancy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_json(capsys):
    code, out, _ = run(capsys, "exact", "--cells", "3", "--sets", "1,1")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["pmf"] == {"1": "2/3", "2": "1/3"}
    assert data["derived"]["b_N"] == "1/2"
    assert data["derived"]["variance"] == "2/9"
    assert set(data["manifest"]) == {"command", "params", "options", "version", "timestamp", "input_hash"}
    assert abs(data["diagnostics"]["T_N"] - 0.816496580927726) < 1e-12


def test_exact_point_mass(capsys):
    code, out, _ = run(capsys, "exact", "--cells", "5", "--sets", "3")
    assert code == 0
    data = json.loads(out)
    assert data["pmf"] == {"2": "1"}
    assert "diagnostics" not in data


@pytest.mark.parametrize(
    "argv",
    [
        ("exact", "--cells", "2", "--sets", "3"),
        ("compare", "--cells", "5", "--sets", "3", "--methods", "thm2"),
        ("compare", "--cells", "8", "--sets", "3,4", "--methods", "thm7"),
        ("convergence", "--p", "0.3", "--N", "10,20"),
        ("convergence", "--p", "0.3,0.5", "--N", "20,40,45"),
        ("bartlett", "--cells", "10", "--sets", "2,3,4,1"),
        ("exact", "--cells", "4", "--sets", "1,1", "--prec", "64"),
    ],
)
def test_domain_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_resource_errors_exit_3(capsys):
    assert run(capsys, "exact", "--cells", "600", "--sets", "1,1")[0] == 3
    code, out, _ = run(capsys, "bartlett", "--cells", "6", "--sets", "2,3", "--t", "1", "--tol", "1e-30")
    assert code == 3


def test_compare_csv(capsys):
    code, out, _ = run(capsys, "compare", "--cells", "40", "--sets", "12,20",
                       "--methods", "thm2,thm3,thm4,gaussian", "--format", "csv")
    assert code == 0
    body = [line for line in out.splitlines() if not line.startswith("#")]
    assert body[0] == "method,normalization,sup_error,status"
    assert [line.split(",")[0] for line in body[1:]] == ["thm2", "thm3", "thm4", "gaussian"]
    assert all(float(line.split(",")[2]) > 0 for line in body[1:])


def test_compare_reports_l3(capsys):
    code, out, _ = run(capsys, "compare", "--cells", "3", "--sets", "1,1", "--methods", "thm3")
    assert code == 0
    meta = json.loads(out)["results"][0]["meta"]
    assert abs(meta["L3"] - 2**-0.5) < 1e-12


def test_compare_soft_failure(capsys):
    # N = 70 exceeds the decomposition degree cap; the other method still runs
    code, out, _ = run(capsys, "compare", "--cells", "70", "--sets", "1,2", "--methods", "thm3,gaussian")
    assert code == 0
    results = json.loads(out)["results"]
    assert results[0]["status"].startswith("error")
    assert results[1]["status"] == "ok"


def test_convergence_headline(capsys):
    code, out, _ = run(capsys, "convergence", "--p", "0.3,0.5", "--N", "20,40,80,160,320", "--method", "thm2")
    assert code == 0
    data = json.loads(out)
    assert -2.0 <= data["slope"] <= -1.0
    assert data["strictly_decreasing"] and data["pass"]


def test_convergence_gaussian_shallower(capsys):
    slopes = {}
    for method in ("gaussian", "thm2"):
        _, out, _ = run(capsys, "convergence", "--p", "0.5,0.5", "--N", "10,20,30", "--method", method)
        slopes[method] = json.loads(out)["slope"]
    assert slopes["gaussian"] > slopes["thm2"]


def test_bartlett_command(capsys):
    code, out, _ = run(capsys, "bartlett", "--cells", "12", "--sets", "4,6", "--t", "0.5,1,2", "--tol", "1e-5")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 3 and all(r["abs_diff"] <= 1e-5 for r in rows)


def test_simulate_reproducible(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    argv = ["simulate", "--cells", "3", "--sets", "1,1", "--trials", "100000", "--seed", "42"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(first)]) == 0
    monkeypatch.setenv("OCCUPANCY_THREADS", "3")
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    data = json.loads(first.read_text())
    assert sum(data["counts"].values()) == 100000
    assert abs(data["mean"] - 4 / 3) <= data["mean_half_width_4se"]


def test_manifest_hash_tracks_inputs(capsys):
    _, a, _ = run(capsys, "exact", "--cells", "4", "--sets", "2,1")
    _, b, _ = run(capsys, "exact", "--cells", "4", "--sets", "1,2")
    assert json.loads(a)["manifest"]["input_hash"] != json.loads(b)["manifest"]["input_hash"]


def test_module_entry_point_exit_code():
    proc = subprocess.run([sys.executable, "-m", "occupancy", "exact", "--cells", "2", "--sets", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
