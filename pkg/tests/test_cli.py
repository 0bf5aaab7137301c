import json
import subprocess
import sys

import pytest

from conftest import GOLDEN, MODELS
from state_algebra.cli import main

TWO = str(MODELS / "two_rules.rules")
EMPTY = str(MODELS / "empty.rules")
DISCONNECTED = str(MODELS / "disconnected.rules")
CONTRADICTION = str(MODELS / "contradiction.rules")
BUNDLED = sorted(p for p in MODELS.glob("*.rules") if p.name != "contradiction.rules")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_query_two_rules(capsys):
    code, out, _ = run(capsys, "query", "--model", TWO, "--target", "X5", "--evidence", "X3=0")
    assert code == 0
    assert out.splitlines()[0] == "P(X5=1 | X3=0) = 0.642857142857"


def test_query_golden(capsys):
    code, doc = run_json(capsys, "query", "--model", TWO, "--target", "X5", "--evidence", "X3=0")
    assert code == 0
    assert doc == json.loads((GOLDEN / "two_rules_query.json").read_text())
    assert doc["probability"] == float(format(1.8 / 2.8, ".12g"))


def test_query_with_oracle(capsys):
    code, doc = run_json(capsys, "query", "--model", TWO, "--target", "X5", "--evidence", "X3=0", "--oracle")
    assert code == 0
    assert doc["oracle"]["probability"] == doc["probability"]
    assert doc["oracle"]["abs_difference"] < 1e-12


def test_query_empty_model(capsys):
    code, doc = run_json(capsys, "query", "--model", EMPTY, "--target", "X1")
    assert code == 0 and doc["probability"] == 0.5


def test_target_evidenced_is_usage_error(capsys):
    code, _, err = run(capsys, "query", "--model", TWO, "--target", "X5", "--evidence", "X5=1")
    assert code == 2 and "evidenced" in err


@pytest.mark.parametrize("bad", ["X9=1", "X1=2", "X1"])
def test_bad_evidence(capsys, bad):
    code, _, _ = run(capsys, "query", "--model", TWO, "--target", "X5", "--evidence", bad)
    assert code == 2


def test_parse_error_exit_code(capsys, tmp_path):
    model = tmp_path / "bad.rules"
    model.write_text("vars A\nrule 0.5 : A &\n")
    code, _, err = run(capsys, "partition", "--model", str(model))
    assert code == 2 and "line 2" in err


def test_missing_model(capsys, tmp_path):
    code, _, _ = run(capsys, "check", "--model", str(tmp_path / "nope.rules"))
    assert code == 2


def test_tiny_epsilon_is_usage_error(capsys, tmp_path):
    model = tmp_path / "det.rules"
    model.write_text("vars A B\nrule det : A\n")
    code, _, err = run(capsys, "query", "--model", str(model), "--target", "B", "--epsilon", "1e-320")
    assert code == 2 and "epsilon" in err


def test_inconsistent_evidence_exit_code(capsys, monkeypatch):
    # strictly positive factors never produce 0/0, so inject the failure
    from state_algebra import cli
    from state_algebra.errors import InconsistentEvidenceError

    def fail(*args, **kwargs):
        raise InconsistentEvidenceError("both target masses vanish")

    monkeypatch.setattr(cli, "query", fail)
    code, _, err = run(capsys, "query", "--model", TWO, "--target", "X5")
    assert code == 3 and "vanish" in err


def test_resource_guard_exit_code(capsys, tmp_path):
    model = tmp_path / "wide.rules"
    model.write_text("vars " + " ".join(f"V{i}" for i in range(26)) + "\nrule 0.5 : V0 -> V25\n")
    code, _, _ = run(capsys, "partition", "--model", str(model), "--oracle")
    assert code == 4


def test_partition(capsys):
    code, doc = run_json(capsys, "partition", "--model", EMPTY)
    assert code == 0 and doc["value"] == 8.0
    assert doc["partition"] == {"mantissa": 0.5, "exponent": 4}
    code, doc = run_json(capsys, "partition", "--model", TWO, "--oracle")
    assert doc["oracle"]["rel_difference"] < 1e-9


def test_partition_single_rule(capsys, tmp_path):
    model = tmp_path / "one.rules"
    model.write_text("vars A B\nrule 0.5 : A\n")
    code, doc = run_json(capsys, "partition", "--model", str(model))
    assert doc["value"] == pytest.approx(2.0)


def test_check(capsys):
    code, doc = run_json(capsys, "check", "--model", CONTRADICTION)
    assert code == 5 and doc["c0"] == 0 and not doc["satisfiable"]
    code, doc = run_json(capsys, "check", "--model", TWO)
    assert code == 0 and doc["c0"] > 0
    code, doc = run_json(capsys, "check", "--model", EMPTY)
    assert code == 0 and doc["c0"] == 8


def test_contradictory_query_exit_code(capsys):
    code, _, _ = run(capsys, "query", "--model", CONTRADICTION, "--target", "X2")
    assert code == 5


def test_explain(capsys):
    _, doc = run_json(capsys, "explain", "--model", TWO, "--evidence", "X3=0")
    assert doc["components"] == [["X1", "X2"], ["X4", "X5"]]
    _, doc = run_json(capsys, "explain", "--model", TWO)
    assert doc["components"] == [["X1", "X2", "X3", "X4", "X5"]]
    assert doc["separator"] == ["X3"]
    _, doc = run_json(capsys, "explain", "--model", DISCONNECTED)
    assert len(doc["components"]) >= 2 and doc["separator"] == [] and not doc["separator_needed"]


@pytest.mark.parametrize("model", BUNDLED, ids=lambda p: p.stem)
def test_strategies_print_identical_probabilities(capsys, model):
    from state_algebra.rules import load_model

    rs = load_model(model)
    for target in rs.variables:
        outs = set()
        for strategy in ("direct", "blanket", "separator"):
            code, out, _ = run(capsys, "query", "--model", str(model), "--target", target, "--strategy", strategy)
            assert code == 0
            outs.add(out.splitlines()[0])
        assert len(outs) == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "state_algebra", "check", "--model", CONTRADICTION],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 5 and "c0" in proc.stdout
