import json

import pytest

from bclkit.cli import main
from bclkit.semantics import model_from_json
from bclkit.syntax import parse


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_command(capsys):
    code, out, _ = run(capsys, "parse", "p => q")
    assert code == 0
    assert out.strip() == "~p | q"


def test_parse_json(capsys):
    code, out, _ = run(capsys, "parse", "--json", "[]p")
    assert code == 0
    doc = json.loads(out)
    assert doc["formula"] == "[]p"
    assert doc["ast"] == {"op": "box", "child": {"op": "var", "name": "p"}}


def test_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "parse", "p ->")
    assert code == 2
    assert "error" in err


def test_decide_valid(capsys):
    code, out, _ = run(capsys, "decide", "--logic", "BCL", "~(p -> ~p)")
    assert code == 0
    assert "valid" in out


def test_decide_countermodel_roundtrips_through_check(capsys, tmp_path):
    code, out, _ = run(capsys, "decide", "--logic", "BCL", "--json", "p -> p")
    assert code == 1
    verdict = json.loads(out)
    assert verdict["verdict"] == "countermodel"
    model_path = tmp_path / "cm.json"
    model_path.write_text(json.dumps(verdict["model"]))
    # the emitted countermodel is accepted verbatim and refutes the formula
    code, _, _ = run(capsys, "check", "--model", str(model_path),
                     "--world", verdict["world"], "p -> p")
    assert code == 1
    code, _, _ = run(capsys, "conditions", "--model", str(model_path),
                     "--logic", "BCL")
    assert code == 0


def test_decide_conds_flag(capsys):
    code, out, _ = run(capsys, "decide", "--conds", "t", "[]p -> p")
    assert code == 0
    assert "valid" in out


def test_decide_json_deterministic(capsys):
    args = ("decide", "--logic", "BCL", "--json", "--deterministic",
            "(p -> q) => (q -> p)")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 1
    assert out1 == out2


def test_check_command(capsys, tmp_path):
    doc = {"worlds": ["w0"], "access": [], "valuation": {"w0": ["p"]},
           "relating": {"w0": [["p", "q"]]}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    code, _, _ = run(capsys, "check", "--model", str(path), "p | ~p")
    assert code == 0
    code, _, _ = run(capsys, "check", "--model", str(path), "p -> q")
    assert code == 1  # material part fails (p true, q false)


def test_conditions_command_violations(capsys, tmp_path):
    doc = {"worlds": ["w0"], "access": [],
           "valuation": {}, "relating": {"w0": [["p", "~p"]]}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "conditions", "--model", str(path),
                       "--conds", "a1", "--json")
    assert code == 1
    doc = json.loads(out)
    assert not doc["admissible"]
    assert doc["violations"][0]["condition"] == "a1"


def test_count_command(capsys):
    code, out, _ = run(capsys, "count", "--carrier", "~p", "--conds", "a1")
    assert code == 0
    assert out.strip() == "8"


def test_count_gcun_inconsistent(capsys):
    code, out, _ = run(capsys, "count", "--carrier",
                       "(p -> q) -> ~~(p -> ~q)",
                       "--conds", "b0,b1,gcun:0,1,0,2")
    assert code == 0
    assert out.strip() == "0"


def test_filtrate_command(capsys, tmp_path):
    doc = {"worlds": ["a", "b"], "access": [],
           "valuation": {"a": ["p"], "b": ["p"]},
           "relating": {"a": [["p", "p"]], "b": [["p", "p"]]}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "filtrate", "--model", str(path),
                       "--gamma", "p", "--json")
    assert code == 0
    result = json.loads(out)
    assert result["model"]["worlds"] == ["a"]
    assert result["classes"] == {"a": "a", "b": "a"}


def test_verify_command(capsys, tmp_path):
    good = {"calculus": "BCL", "steps": [
        {"formula": "~(p -> ~p)", "rule": "A1"},
        {"formula": "~(p -> ~p) => (~(p -> ~p) | q)", "rule": "CPL"},
        {"formula": "~(p -> ~p) | q", "rule": {"ds": [1, 2]}},
    ]}
    path = tmp_path / "good.json"
    path.write_text(json.dumps(good))
    code, out, _ = run(capsys, "verify", "--proof", str(path))
    assert code == 0 and "verified" in out

    bad = dict(good, steps=[{"formula": "~(p -> q)", "rule": "A1"}])
    path.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "verify", "--proof", str(path), "--json")
    assert code == 1
    assert json.loads(out)["step"] == 1


def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "verify", "--proof", "/does/not/exist.json")
    assert code == 2
