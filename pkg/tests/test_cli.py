import json
import subprocess
import sys

import numpy as np
import pytest

from framesub.cli import main
from framesub.frames import write_frame
from framesub.recovery import NodeSet, write_nodes_csv, write_samples_csv


@pytest.fixture
def frame_file(tmp_path, rng):
    Y = (rng.standard_normal((40, 4)) + 1j * rng.standard_normal((40, 4))) / 10
    path = tmp_path / "Y.json"
    write_frame(path, Y)
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds(frame_file, capsys):
    code, out, _ = run(["bounds", "--in", frame_file], capsys)
    d = json.loads(out)
    assert code == 0 and d["m"] == 4 and d["M"] == 40 and 0 < d["A"] <= d["B"]


@pytest.mark.parametrize("strategy,extra", [
    ("random-weighted", ["--n", "30"]),
    ("random-unweighted", ["--n", "30"]),
    ("bss", ["--b", "30"]),
    ("bss-perp", ["--b", "2"]),
    ("plain-bss", ["--b-prime", "3", "--relaxed"]),
    ("two-step", ["--b-prime", "3", "--relaxed"]),
])
def test_subsample_strategies_deterministic(frame_file, capsys, strategy, extra):
    argv = ["subsample", "--strategy", strategy, "--in", frame_file, "--seed", "5", *extra]
    c1, o1, _ = run(argv, capsys)
    c2, o2, _ = run(argv, capsys)
    assert c1 == 0 and o1 == o2
    json.loads(o1)


def test_subsample_csv(frame_file, capsys):
    code, out, _ = run(["subsample", "--strategy", "bss", "--b", "30", "--in", frame_file, "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[0].startswith("index")


def test_validation_exit_code(frame_file, capsys):
    code, _, err = run(["subsample", "--strategy", "bss", "--b", "1.5", "--in", frame_file], capsys)
    assert code == 2
    e = json.loads(err)
    assert set(e) == {"code", "message", "context"} and e["code"] == "invalid-config"


def test_usage_exit_code(capsys):
    code, _, err = run(["bounds"], capsys)
    assert code == 2 and json.loads(err)["code"] == "usage"


def test_missing_file(tmp_path, capsys):
    code, _, err = run(["bounds", "--in", tmp_path / "nope.json"], capsys)
    assert code == 2 and json.loads(err)["code"] == "invalid-input"


def test_recover_rank_error_exit_3(tmp_path, capsys):
    write_nodes_csv(tmp_path / "n.csv", NodeSet(np.zeros((10, 1))))
    write_samples_csv(tmp_path / "s.csv", np.ones(10, dtype=complex))
    code, _, err = run(["recover", "--frequencies", "full-grid", "--d", "1", "--lo", "-2", "--hi", "2",
                        "--nodes", tmp_path / "n.csv", "--samples", tmp_path / "s.csv"], capsys)
    e = json.loads(err)
    assert code == 3 and e["code"] == "rank-error" and "sigma_min" in e["context"]


def test_nodes_then_recover(tmp_path, capsys):
    nodes = tmp_path / "n.csv"
    common = ["--frequencies", "full-grid", "--d", "1", "--lo", "-10", "--hi", "10"]
    code, out, _ = run(["nodes", *common, "--b", "2", "--relaxed", "--out", nodes], capsys)
    meta = json.loads(out)
    assert code == 0 and meta["m"] == 21 and meta["mz_lambda_min"] > 0
    X = np.loadtxt(nodes, delimiter=",", skiprows=1, ndmin=2)[:, :1]
    k = np.arange(-10, 11)
    f = np.exp(2j * np.pi * X[:, 0:1] * k) @ (k + 1.0)
    write_samples_csv(tmp_path / "s.csv", f)
    code, out, _ = run(["recover", *common, "--nodes", nodes, "--samples", tmp_path / "s.csv"], capsys)
    d = json.loads(out)
    c = np.array(d["coefficients"])
    assert code == 0 and np.allclose(c[:, 0], k + 1, atol=1e-8) and d["residual"] < 1e-8


def test_experiment_csv(capsys):
    code, out, _ = run(["experiment", "--id", "3", "--m3", "20", "--b", "1.5,2"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "b,n,A,bound,B,inner_iter_avg" and len(lines) == 3


def test_experiment_json_omits_runtime_by_default(capsys):
    _, o1, _ = run(["experiment", "--id", "3", "--m3", "15", "--b", "2", "--format", "json"], capsys)
    _, o2, _ = run(["experiment", "--id", "3", "--m3", "15", "--b", "2", "--format", "json"], capsys)
    assert o1 == o2 and "runtime" not in json.loads(o1)[0]


def test_module_entry_point(frame_file):
    p = subprocess.run([sys.executable, "-m", "framesub", "bounds", "--in", str(frame_file)],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "frobenius_sq" in p.stdout
