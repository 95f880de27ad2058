import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from procflow.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_snake(capsys):
    code, out, _ = run(capsys, "eval", SAMPLES / "snake.json", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["shape"] == [2, 2]
    assert rep["entries"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]


def test_eval_circle(capsys):
    code, out, _ = run(capsys, "eval", SAMPLES / "loop.json", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["value"] == 3.0 and rep["loops"] == 1


def test_eval_random_model_with_dims(capsys):
    code, out, _ = run(capsys, "eval", SAMPLES / "loop.json", "--model", "random:4", "--dims", "A=5",
                       "--json")
    assert code == 0 and json.loads(out)["value"] == 5.0


def test_eval_malformed(capsys):
    code, _, err = run(capsys, "eval", SAMPLES / "broken.json")
    assert code == 2 and "line 6, column 1" in err


def test_eval_missing_file(capsys):
    code, _, _ = run(capsys, "eval", SAMPLES / "nope.json")
    assert code == 2


def test_eval_type_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema": "procflow/v1",
                             "theory": {"types": ["A", "B"], "generators": {}},
                             "diagram": {"op": "compose", "args": [{"op": "id", "types": ["A"]},
                                                                   {"op": "id", "types": ["B"]}]}}))
    code, _, err = run(capsys, "eval", p)
    assert code == 3 and "type error" in err


def test_eval_model_mismatch(capsys):
    code, _, _ = run(capsys, "eval", SAMPLES / "snake.json", "--model", SAMPLES / "hadamard.json")
    assert code == 4


def test_eq_interchange(capsys):
    code, out, _ = run(capsys, "eq", SAMPLES / "interchange_lhs.json", SAMPLES / "interchange_rhs.json")
    assert code == 0 and "equal" in out
    code, _, _ = run(capsys, "eq", SAMPLES / "interchange_lhs.json", SAMPLES / "interchange_rhs.json",
                     "--mode", "numeric", "--trials", "100")
    assert code == 0


def test_eq_swap_vs_identity(capsys):
    code, out, _ = run(capsys, "eq", SAMPLES / "swap.json", SAMPLES / "id2.json", "--mode", "numeric",
                       "--seed", "11")
    assert code == 1 and "witness_seed: 11" in out
    code, _, _ = run(capsys, "eq", SAMPLES / "swap.json", SAMPLES / "id2.json")
    assert code == 1


def test_eq_theory_mismatch(capsys):
    code, _, _ = run(capsys, "eq", SAMPLES / "swap.json", SAMPLES / "hadamard.json")
    assert code == 4


def test_seed_env_and_flag(capsys, monkeypatch):
    monkeypatch.setenv("PROCFLOW_SEED", "7")
    _, out, _ = run(capsys, "eq", SAMPLES / "swap.json", SAMPLES / "id2.json", "--mode", "numeric", "--json")
    assert json.loads(out)["witness_seed"] == 7
    _, out, _ = run(capsys, "eq", SAMPLES / "swap.json", SAMPLES / "id2.json", "--mode", "numeric", "--json",
                    "--seed", "3")
    assert json.loads(out)["witness_seed"] == 3


def test_analyze_causal(capsys):
    code, out, _ = run(capsys, "analyze", SAMPLES / "hadamard.json", "--check", "causal", "--json")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_analyze_unitary(capsys):
    code, _, _ = run(capsys, "analyze", SAMPLES / "hadamard.json", "--check", "unitary")
    assert code == 0


def test_analyze_isometry_needs_pure(capsys):
    code, _, err = run(capsys, "analyze", SAMPLES / "discard.json", "--check", "isometry")
    assert code == 3 and "pure" in err


def test_analyze_stinespring(capsys):
    code, out, _ = run(capsys, "analyze", SAMPLES / "discard.json", "--check", "stinespring", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["env_dim"] == 2 and len(rep["V"]) == 2


def test_analyze_broadcast(capsys):
    code, out, _ = run(capsys, "analyze", SAMPLES / "copy.json", "--check", "broadcast", "--json")
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "fail"
    assert [0, 1, -0.5, 0.0] in rep["left_violations"]


def test_analyze_nosignal(capsys):
    code, _, _ = run(capsys, "analyze", SAMPLES / "nosignal.json", "--check", "nosignal")
    assert code == 0
    code, _, err = run(capsys, "analyze", SAMPLES / "copy.json", "--check", "nosignal")
    assert code == 3


@pytest.mark.parametrize("name", ["teleport", "rel-counterexample", "no-broadcast", "phases"])
def test_demos(capsys, name):
    code, out, _ = run(capsys, "demo", name)
    assert code == 0 and "success" in out and "FAIL" not in out


def test_console_script_entry():
    # same entry point through a fresh interpreter, to check exit codes survive
    env = dict(os.environ, PROCFLOW_SEED="0")
    r = subprocess.run([sys.executable, "-m", "procflow.cli", "eval", str(SAMPLES / "broken.json")],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 2


def test_deterministic_output(capsys):
    a = run(capsys, "eval", SAMPLES / "snake.json", "--model", "random:9", "--json")[1]
    b = run(capsys, "eval", SAMPLES / "snake.json", "--model", "random:9", "--json")[1]
    assert a == b
