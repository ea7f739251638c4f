import json

import pytest

from omegalab.cli import SweepConfig, main, parse_range
from omegalab.suites import run_suite


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("3") == [3]
    assert parse_range("1,5") == [1, 5]


def test_empty_grid_rejected():
    with pytest.raises(ValueError):
        SweepConfig("atomic", n=[])


def test_verify_atomic(tmp_path):
    out = tmp_path / "atomic.json"
    assert main(["verify", "atomic", "--n", "1..10", "--k", "0..8", "--c", "0..6", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["ok"] and len(data["rows"]) == 10 * 9 * 7
    assert data["config"]["n"] == list(range(1, 11))


def test_verify_general_rows(tmp_path):
    out = tmp_path / "general.csv"
    assert main(["verify", "general", "--seed", "7", "--count", "200", "--out", str(out), "--format", "csv"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("seed,index,signature") and len(lines) == 201


def test_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nosuch"])
    assert exc.value.code == 2


def test_worker_pool_matches_serial(monkeypatch):
    cfg = SweepConfig("truncsums", seed=3, count=12)
    serial = run_suite("truncsums", cfg, workers=1)
    pooled = run_suite("truncsums", cfg, workers=2)
    assert serial.rows == pooled.rows


def test_run_hload(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["run", "hload", "--h", "x+2", "--interval", "1..3", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["final"]["gamma"]["value"] == "1/4"
    assert data["final"]["gamma"]["binary"] == "0.01"


def test_run_hload_table(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["run", "hload", "--h", "x+g", "--g", "[1,2,3]", "--interval", "0..3",
                 "--out", str(out), "--format", "csv"]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 7


def test_run_bad_expression(capsys):
    assert main(["run", "hload", "--h", "x*2"]) == 2
    assert "unsupported use expression" in capsys.readouterr().err


def test_run_encode(tmp_path, capsys):
    a = tmp_path / "a.json"
    a.write_text(json.dumps(["0", "1/4", "3/8", "5/8", "11/16"]))
    assert main(["run", "encode", "--approx", str(a), "--n", "4"]) == 0
    bits = capsys.readouterr().out.strip()
    assert len(bits) == 15 and set(bits) <= {"0", "1"}


def test_run_construct(tmp_path):
    plan = tmp_path / "plan.json"
    # two requirements on small blocks of 4 and 3 digits
    plan.write_text(json.dumps({"signature": [[0, 1, 1], [1, 2, 2], [4, 3, 6], [5, 7, 9]],
                                "boundaries": [1, 2, 3]}))
    out = tmp_path / "trace.json"
    assert main(["run", "construct", "--plan", str(plan), "--adversaries", "least_effort:2",
                 "--out", str(out), "--full"]) == 0
    data = json.loads(out.read_text())
    assert len(data["requirements"]) == 2 and "digest" in data
    assert all(r["outcome"] in ("met_by_capped_gamma", "met_by_disagreement", "open")
               for r in data["requirements"])


def test_run_reduce(tmp_path):
    omega = tmp_path / "o.json"
    omega.write_text(json.dumps(["0", "1/4", "3/8", "1/2", "5/8", "11/16"]))
    A = tmp_path / "A.json"
    A.write_text(json.dumps([[3, 1], [1, 2], [5, 4]]))
    out = tmp_path / "r.json"
    assert main(["run", "reduce", "--omega", str(omega), "--A", str(A), "--g", "[2,4,6,8,10,12]",
                 "--approx", str(omega), "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert [d["bit"] for d in data["decisions"]] == [1, 0, 1, 0, 1, 0]
    assert all(p["prefix"] == p["true"] for p in data["prefixes"])
