import csv
import json

import numpy as np
import pytest

from rawlskmeans.cli import main

HEADER = ["age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
          "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
          "hours-per-week", "native-country", "income"]


def _write_adult(path, n=300, seed=0):
    rng = np.random.default_rng(seed)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for _ in range(n):
            w.writerow([
                rng.integers(17, 90), rng.choice(["Private", "State-gov", "Self-emp"]),
                rng.integers(10_000, 400_000), rng.choice(["HS-grad", "Bachelors", "Masters"]),
                rng.integers(1, 17), "Never-married",
                rng.choice(["Sales", "Tech-support", "Craft-repair", "?"], p=[0.3, 0.3, 0.35, 0.05]),
                "Husband", "White", rng.choice(["Female", "Male"], p=[0.3, 0.7]),
                rng.integers(0, 5000), rng.integers(0, 2000), rng.integers(10, 80),
                "United-States", rng.choice(["<=50K", ">50K"], p=[0.7, 0.3]),
            ])
    return path


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    src = _write_adult(root / "adult.csv")
    data = root / "data.json"
    assert main(["preprocess", "--input", str(src), "--per-class", "40", "--seed", "3",
                 "--out", str(data)]) == 0
    assert main(["scan", "--dataset", str(data), "--k", "3", "--runs", "20", "--seed", "0",
                 "--filter", "none", "--out", str(root / "scan"), "--svg"]) == 0
    return root


def test_preprocess_outputs(pipeline):
    d = json.loads((pipeline / "data.json").read_text())
    stats = json.loads((pipeline / "data.json.stats.json").read_text())
    assert stats["examples"] == 80 and stats["delta"] == 8
    assert stats["config"]["per_class"] == 40
    assert len(stats["dataset_hash"]) == 16
    assert d is not None


def test_scan_outputs(pipeline):
    scan_dir = pipeline / "scan"
    for name in ("points.csv", "utilitarian.json", "approx_rawlsian.json", "summary.json", "scan.svg"):
        assert (scan_dir / name).exists()
    summary = json.loads((scan_dir / "summary.json").read_text())
    assert summary["retained_runs"] == 20 and "dataset_hash" in summary


def test_single_run_scan_marks_both(pipeline, tmp_path):
    assert main(["scan", "--dataset", str(pipeline / "data.json"), "--k", "3", "--runs", "1",
                 "--filter", "none", "--out", str(tmp_path)]) == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["utilitarian"]["index"] == s["approx_rawlsian"]["index"] == 0


def _traverse(pipeline, out, *extra):
    return main(["traverse", "--dataset", str(pipeline / "data.json"),
                 "--start", str(pipeline / "scan" / "utilitarian.json"), "--out", str(out), *extra])


def test_traverse_r1_file(pipeline, tmp_path):
    out = tmp_path / "r1.csv"
    assert _traverse(pipeline, out, "--operator", "R1", "--dump-candidates", str(tmp_path / "c.csv")) == 0
    rows = list(csv.DictReader(open(out)))
    lags = [float(r["lag"]) for r in rows]
    assert all(b > a for a, b in zip(lags, lags[1:]))
    meta = json.loads((tmp_path / "r1.meta.json").read_text())
    assert meta["reason"] == "null-op" and meta["steps"] == len(rows) - 1
    assert meta["lag_mag_gap"] >= 0 and meta["config"]["operator"] == "r1"
    assert (tmp_path / "r1.final.json").exists()


def test_traverse_cap_zero(pipeline, tmp_path):
    out = tmp_path / "t.csv"
    assert _traverse(pipeline, out, "--cap", "0") == 0
    meta = json.loads((tmp_path / "t.meta.json").read_text())
    assert meta["steps"] == 0 and meta["reason"] == "iteration-cap"
    assert len(list(csv.reader(open(out)))) == 2


def test_traverse_bad_operator(pipeline, tmp_path):
    with pytest.raises(SystemExit) as e:
        _traverse(pipeline, tmp_path / "t.csv", "--operator", "r3")
    assert e.value.code == 2


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["preprocess", "--out", str(tmp_path / "d.json")])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["preprocess", "--input", "x.csv", "--out", "d.json", "--per-class", "0"])
    assert e.value.code == 2


def test_runtime_errors(tmp_path, capsys):
    assert main(["preprocess", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "d.json")]) == 1
    (tmp_path / "bad.csv").write_text("age,sex\n1,Male\n")
    assert main(["preprocess", "--input", str(tmp_path / "bad.csv"), "--out", str(tmp_path / "d.json")]) == 1
    assert "occupation" in capsys.readouterr().err


def test_empty_filter_is_runtime_error(pipeline, tmp_path, capsys):
    # --runs 1 with a filter that rejects it
    code = main(["scan", "--dataset", str(pipeline / "data.json"), "--k", "80", "--runs", "1",
                 "--out", str(tmp_path)])
    # k = n puts every utility at delta, so the groups tie and no run is kept
    assert code == 1
    assert "LAG counts" in capsys.readouterr().err


def test_report_malformed_names_line(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("seed,U0,U1,lag,mag,overall,lag_group\n1,0.1,0.2,0.1,0.2,0.15,0\n2,x,0.2,0.1,0.2,0.15,0\n")
    assert main(["report", "--points", str(tmp_path / "p.csv"), "--out", str(tmp_path / "o.svg")]) == 1
    assert "p.csv:3" in capsys.readouterr().err


def test_report_deterministic_and_empty_trajectory(pipeline, tmp_path):
    traj = tmp_path / "t.csv"
    assert _traverse(pipeline, traj, "--cap", "0") == 0
    args = ["report", "--points", str(pipeline / "scan" / "points.csv"), "--trajectory", str(traj)]
    assert main(args + ["--out", str(tmp_path / "a.svg")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.svg")]) == 0
    a = (tmp_path / "a.svg").read_bytes()
    assert a == (tmp_path / "b.svg").read_bytes()
    assert a.startswith(b"<svg") or a.startswith(b"<?xml")
    assert b"<circle" in a  # the start marker


def test_env_override(pipeline, tmp_path):
    env = {"RAWLSKM_CAP": "0", "RAWLSKM_DATASET": str(pipeline / "data.json")}
    out = tmp_path / "e.csv"
    assert main(["traverse", "--start", str(pipeline / "scan" / "utilitarian.json"),
                 "--out", str(out)], environ=env) == 0
    meta = json.loads((tmp_path / "e.meta.json").read_text())
    assert meta["config"]["cap"] == 0
    # explicit flags win
    assert main(["traverse", "--start", str(pipeline / "scan" / "utilitarian.json"),
                 "--out", str(out), "--cap", "1"], environ=env) == 0
    assert json.loads((tmp_path / "e.meta.json").read_text())["config"]["cap"] == 1
