import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from clustersync import fixtures as fx
from clustersync.cli import main
from clustersync.errors import InputError
from clustersync.io import load_network, parse_network, read_trajectory_csv, save_network

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
EX1 = str(FIXTURES / "example1.json")
EX2 = str(FIXTURES / "example2.json")
EMPTY_MASK = str(FIXTURES / "example2_empty_mask.json")


def _json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


def test_fixture_files_match_python_fixtures():
    for path, nf in [(EX1, fx.example1()), (EX2, fx.example2())]:
        loaded = load_network(path)
        np.testing.assert_array_equal(loaded.net.weights, nf.net.weights)
        np.testing.assert_array_equal(loaded.net.omega, nf.net.omega)
        assert loaded.partition == nf.partition
    np.testing.assert_array_equal(load_network(EX2).mask, fx.EXAMPLE2_MASK)
    assert load_network(EX1).mask is None


def test_check_example1(capsys):
    assert main(["check", EX1]) == 0
    report = _json_lines(capsys.readouterr().out)[0]
    assert report["synchronizable"] and report["matrix_residual"] <= 1e-12


def test_check_example2(capsys, tmp_path):
    assert main(["check", EX2, "--report", str(tmp_path / "r.json")]) == 1
    report = json.loads((tmp_path / "r.json").read_text())
    assert {(tuple(v["node_pair"]), v["gap"]) for v in report["violations"]} == {((0, 1), 2.0), ((0, 2), 2.0)}


def test_exit_code_independent_of_quiet(capsys):
    assert main(["check", EX2, "--quiet"]) == main(["check", EX2]) == 1
    capsys.readouterr()
    assert main(["check", EX1, "--quiet"]) == 0
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("content", [
    '{"n": 6, "edges": [[0, 1, 2.0]',
    "",
    '{"n": 2, "edges": [], "clusters": [[0], [1]]}',
    '{"n": 2, "edges": [[0, 1, 1], [0, 1, 2]], "clusters": [[0], [1]], "omega": [0, 0]}',
    '{"n": 2, "edges": [[0, 2, 1]], "clusters": [[0], [1]], "omega": [0, 0]}',
    '{"n": 3, "edges": [], "clusters": [[0, 1], [1, 2]], "omega": [0, 0, 0]}',
    '{"n": 2, "edges": [], "clusters": [[0], [1]], "omega": [0]}',
    '{"n": 2, "edges": [], "clusters": [[0], [1]], "omega": [0, 0], "mask_edges": "some"}',
])
def test_check_input_errors(tmp_path, capsys, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert main(["check", str(path)]) == 3
    assert "error" in capsys.readouterr().err


def test_missing_file_exit3(tmp_path):
    assert main(["check", str(tmp_path / "nope.json")]) == 3


def test_error_names_field():
    with pytest.raises(InputError) as info:
        parse_network({"n": 2, "edges": [[0, 1, 1], [0, 1, 2]], "clusters": [[0], [1]], "omega": [0, 0]})
    assert info.value.field == "edges[1]"


def test_self_loops_dropped_and_missing_mask_means_all():
    nf = parse_network({"n": 2, "edges": [[0, 0, 4.0], [1, 0, -1.5]], "clusters": [[1], [0]], "omega": [1, 2]})
    assert nf.net.weights.tolist() == [[0.0, 0.0], [-1.5, 0.0]]
    assert nf.mask is None and nf.partition.clusters == ((1,), (0,))


def test_repair_example2(tmp_path, capsys):
    out = tmp_path / "fixed.json"
    assert main(["repair", EX2, "--out", str(out), "--allow-sign-flips"]) == 0
    report = json.loads(out.with_suffix(".report.json").read_text())
    assert report["feasible"] and report["constraint_residual"] <= 1e-9
    assert report["frobenius_norm"] == pytest.approx(np.sqrt(6.0), rel=1e-12)
    changed = {(i, j): (old, new) for i, j, old, new in report["changed_edges"]}
    assert set(changed) == {(1, 4), (2, 4), (2, 5)}
    for i, j in changed:
        assert fx.EXAMPLE2_MASK[i, j] == 1
    assert main(["check", str(out)]) == 0


def test_repair_unconstrained(tmp_path):
    out = tmp_path / "fixed.json"
    assert main(["repair", EX2, "--out", str(out), "--unconstrained", "--quiet", "--allow-sign-flips"]) == 0
    assert main(["check", str(out), "--quiet"]) == 0


def test_repair_feasible_input_unchanged(tmp_path):
    out = tmp_path / "same.json"
    assert main(["repair", EX1, "--out", str(out)]) == 0
    np.testing.assert_array_equal(load_network(out).net.weights, load_network(EX1).net.weights)
    assert json.loads(out.with_suffix(".report.json").read_text())["changed_edges"] == []


def test_repair_infeasible_exit2(tmp_path, capsys):
    assert main(["repair", EMPTY_MASK, "--out", str(tmp_path / "x.json")]) == 2
    assert "KKT residual" in capsys.readouterr().err
    assert not (tmp_path / "x.json").exists()


def test_repair_round_trip_bit_identical(tmp_path):
    out = tmp_path / "fixed.json"
    main(["repair", EX2, "--out", str(out), "--unconstrained", "--quiet", "--allow-sign-flips"])
    first = load_network(out)
    again = tmp_path / "again.json"
    main(["repair", str(out), "--out", str(again), "--unconstrained", "--quiet"])
    np.testing.assert_array_equal(load_network(again).net.weights, first.net.weights)
    # weights survive write -> read exactly
    save_network(first, tmp_path / "copy.json")
    assert load_network(tmp_path / "copy.json").net.weights.tobytes() == first.net.weights.tobytes()


def test_repair_requires_out():
    with pytest.raises(SystemExit) as info:
        main(["repair", EX2])
    assert info.value.code == 3


def test_simulate_writes_csvs(tmp_path, capsys):
    traj, metrics = tmp_path / "t.csv", tmp_path / "m.csv"
    code = main(["simulate", EX1, "--traj", str(traj), "--metrics", str(metrics),
                 "--t-final", "2", "--dt", "0.01", "--sample-every", "10"])
    assert code == 0
    with open(traj) as fh:
        header = next(csv.reader(fh))
    assert header == ["t"] + [f"theta_{i}" for i in range(6)] + [f"freq_{i}" for i in range(6)]
    with open(metrics) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "spread_phase_0", "spread_phase_1", "spread_freq_0", "spread_freq_1", "order_0", "order_1"]
    assert len(rows) == 22
    t = read_trajectory_csv(traj)
    assert t.thetas.shape == (21, 6)
    # two frequency bands: the fast cluster stays ahead
    assert np.all(t.freqs[:, 0] > t.freqs[:, 3])
    assert "final phase spread" in capsys.readouterr().out


def test_simulate_explicit_theta0(tmp_path):
    traj = tmp_path / "t.csv"
    assert main(["simulate", EX1, "--traj", str(traj), "--t-final", "0.1", "--dt", "0.01",
                 "--theta0", "0,0,0,1,1,1"]) == 0
    assert read_trajectory_csv(traj).thetas[0].tolist() == [0, 0, 0, 1, 1, 1]


@pytest.mark.parametrize("flags", [["--dt", "0"], ["--theta0", "1,2"], ["--theta0", "abc"], ["--sample-every", "0"]])
def test_simulate_bad_config_exit3(tmp_path, flags):
    assert main(["simulate", EX1, "--traj", str(tmp_path / "t.csv"), *flags]) == 3


def test_simulate_nonfinite_exit4(tmp_path, capsys):
    path = tmp_path / "huge.json"
    path.write_text(json.dumps({"n": 2, "edges": [], "clusters": [[0], [1]], "omega": [1e308, 1e308]}))
    assert main(["simulate", str(path), "--traj", str(tmp_path / "t.csv"), "--t-final", "5", "--dt", "1"]) == 4
    assert "last valid time" in capsys.readouterr().err


def test_pipeline_example2(tmp_path):
    out = tmp_path / "run"
    assert main(["pipeline", EX2, "--out", str(out), "--t-final", "2", "--quiet", "--allow-sign-flips"]) == 0
    for name in ["check_before.json", "repaired.json", "repair_report.json", "check_after.json",
                 "traj_before.csv", "traj_after.csv", "metrics_before.csv", "metrics_after.csv", "summary.json"]:
        assert (out / name).exists(), name
    summary = json.loads((out / "summary.json").read_text())
    assert summary["check_before"] == 1 and summary["check_final"] == 0
    after = np.loadtxt(out / "metrics_after.csv", delimiter=",", skiprows=1)
    assert after[:, 1:3].max() <= 1e-6
    before = np.loadtxt(out / "metrics_before.csv", delimiter=",", skiprows=1)
    assert before[:, 1:3].max() > 1e-2


def test_pipeline_example1_skips_repair(tmp_path):
    out = tmp_path / "run"
    assert main(["pipeline", EX1, "--out", str(out), "--t-final", "1", "--quiet"]) == 0
    assert not (out / "repaired.json").exists()
    assert json.loads((out / "summary.json").read_text())["repair"] is None


def test_pipeline_infeasible_stops(tmp_path):
    out = tmp_path / "run"
    assert main(["pipeline", EMPTY_MASK, "--out", str(out), "--quiet"]) == 2
    assert not (out / "traj_before.csv").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "clustersync", "check", EX1, "--quiet"])
    assert proc.returncode == 0
