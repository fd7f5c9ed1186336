import json
import subprocess
import sys

import pytest

from rankcomm.cli import parse_range, run


def call(tmp_path, *argv):
    out = tmp_path / "report.json"
    code, report = run([*argv, "--out", str(out)])
    return code, report, out


def test_count(tmp_path):
    code, rep, _ = call(tmp_path, "count", "--n", "3", "--k", "1", "--q", "2", "--enumerate")
    assert code == 0 and rep["result"]["count"] == 49 and rep["result"]["agree"]


def test_gallery_example(tmp_path):
    code, rep, out = call(
        tmp_path, "gallery", "example", "--n", "3", "--field", "p:3", "--verify", "rank:1", "--mode", "exhaustive"
    )
    assert code == 0 and rep["result"]["checked"] == 338
    assert rep["result"]["decomposition"]["not_standard"]
    assert json.loads(out.read_text()) == rep


def test_dim(tmp_path):
    code, rep, _ = call(tmp_path, "dim", "--n", "2", "--k", "1", "--field", "p:5")
    assert code == 0 and rep["result"]["dimension"] == 5


def test_complete(tmp_path):
    code, rep, _ = call(
        tmp_path, "complete", "--n", "3", "--k", "3", "--pattern", "1,1;1,2", "--field", "p:5", "--verify-fields", "p:7"
    )
    assert code == 0 and rep["result"]["B_support"] == [[2, 2], [3, 3]]
    assert rep["result"]["cross_checks"][0]["passed"]
    code, rep, _ = call(tmp_path, "complete", "--n", "2", "--k", "2", "--pattern", "1,1;1,2;2,1;2,2", "--field", "p:3")
    assert code == 2 and rep["result"]["error"] == "Infeasible"


def test_replay_and_decompose_from_files(tmp_path):
    std = tmp_path / "standard.json"
    assert run(["gallery", "standard", "--n", "3", "--field", "p:7", "--lam", "3", "--mu", "e11:1", "--out", str(std)])[0] == 0
    code, rep, _ = call(tmp_path, "replay", "--map", str(std), "--k", "1")
    assert code == 2 and rep["result"]["error"] == "UnsupportedK"
    code, rep, _ = call(tmp_path, "replay", "--map", str(std), "--k", "2")
    assert code == 0 and rep["result"]["standard_form"] == {"lambda": "3", "mu": {"e11": "1"}}
    code, rep, _ = call(tmp_path, "decompose", "--map", str(std))
    assert code == 0 and rep["result"]["lambda"] == "3"

    left = tmp_path / "left.json"
    run(["gallery", "left", "--n", "3", "--field", "p:5", "--out", str(left)])
    code, rep, _ = call(tmp_path, "replay", "--map", str(left), "--k", "2")
    assert code == 1 and rep["result"]["violation"] and "witness" in rep["result"]
    code, rep, _ = call(tmp_path, "verify", "--map", str(left), "--selector", "rank:2", "--mode", "random")
    assert code == 1 and "witness" in rep["result"]


def test_guard_exit(tmp_path):
    ident = tmp_path / "id.json"
    run(["gallery", "identity", "--n", "3", "--field", "p:3", "--out", str(ident)])
    code, rep, _ = call(tmp_path, "replay", "--map", str(ident), "--k", "2")
    assert code == 2 and rep["result"]["error"] == "GuardFailed"


def test_trace_commands(tmp_path):
    sq = tmp_path / "square.json"
    corner = tmp_path / "corner.json"
    run(["gallery", "power", "--n", "3", "--m", "2", "--field", "p:7", "--out", str(sq)])
    run(["gallery", "corner", "--n", "3", "--field", "p:7", "--out", str(corner)])
    code, rep, _ = call(tmp_path, "trace", "decompose", "--map", str(sq))
    assert code == 0 and rep["result"]["mu0"] == "2"
    code, rep, _ = call(tmp_path, "trace", "decompose", "--map", str(corner))
    assert code == 1 and rep["result"]["not_decomposable"]
    code, rep, _ = call(tmp_path, "trace", "replay", "--map", str(sq), "--k", "3")
    assert code == 0 and rep["result"]["verdict"] == "commuting everywhere"
    code, rep, _ = call(tmp_path, "trace", "replay", "--map", str(corner), "--k", "2")
    assert code == 2
    code, rep, _ = call(tmp_path, "trace", "extract", "--map", str(sq), "--pattern", "1,1;2,2", "--k", "3")
    assert code == 0 and rep["result"]["extracted_zero"]
    code, rep, _ = call(tmp_path, "trace", "verify", "--map", str(corner), "--selector", "rank:3", "--mode", "random")
    assert code == 1


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as err:
        run(["dim", "--n"])
    assert err.value.code == 3
    code, rep = run(["complete", "--n", "3", "--k", "2", "--pattern", "9,9", "--field", "p:5"])
    assert code == 3 and rep is None
    code, rep = run(["decompose", "--map", str(tmp_path / "missing.json")])
    assert code == 3


def test_text_format(tmp_path):
    out = tmp_path / "t.txt"
    code, _ = run(["sweep", "--n", "2", "--k", "1..n", "--fields", "p:2,p:3", "--format", "text", "--out", str(out)])
    text = out.read_text()
    assert code == 0 and "dimension" in text and "p:2" in text


def test_sweep_flags_and_worker_independence(tmp_path):
    argv = ["sweep", "--n", "2", "--k", "1..n", "--fields", "p:2,p:3,p:5"]
    _, one = run([*argv, "--workers", "1", "--out", str(tmp_path / "a")])
    _, three = run([*argv, "--workers", "3", "--out", str(tmp_path / "b")])
    assert json.dumps(one["result"]) == json.dumps(three["result"])
    cells = {(c["n"], c["k"], c["field"]): c for c in one["result"]["cells"]}
    assert cells[(2, 1, "p:2")]["outside_hypotheses"]
    assert cells[(2, 1, "p:5")]["dimension"] == 5


def test_parse_range():
    assert parse_range("2..3") == [2, 3]
    assert parse_range("1..n", 3) == [1, 2, 3]
    assert parse_range("1,3") == [1, 3]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rankcomm", "count", "--n", "2", "--k", "2", "--q", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["count"] == 6
