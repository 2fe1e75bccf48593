import json

import pytest

from relfix.cli import main
from relfix.instance import FIXTURE_DIR, InstanceError, canonical, digest, load, loads

FIXTURES = sorted(p.name for p in FIXTURE_DIR.glob("*.json") if p.name != "fuzz-seed.json")


def ex52_doc():
    return json.loads((FIXTURE_DIR / "example-5-2.json").read_text())


def write(tmp_path, doc, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


@pytest.mark.parametrize("name", FIXTURES)
def test_canonical_round_trip(name):
    inst = load(FIXTURE_DIR / name)
    once = canonical(inst)
    again = canonical(loads(once))
    assert once == again
    assert digest(inst) == digest(loads(once))


def test_fixture_shortcut_resolves():
    assert load("fixtures/example-5-2").name == "example-5-2"
    with pytest.raises(InstanceError, match="no such"):
        load("fixtures/nothing-here")


def test_undeclared_label():
    doc = ex52_doc()
    doc["relation"].append(["0", "7"])
    with pytest.raises(InstanceError, match="undeclared label '7'"):
        loads(json.dumps(doc))


def test_non_total_map():
    doc = ex52_doc()
    del doc["T"]["2"]
    with pytest.raises(InstanceError, match="not total"):
        loads(json.dumps(doc))


def test_unknown_mode_and_bad_json():
    with pytest.raises(InstanceError, match="mode"):
        loads('{"mode": "sideways"}')
    with pytest.raises(InstanceError, match="JSON"):
        loads('{"mode": ')


def test_cli_verify_example(capsys):
    assert main(["verify", "fixtures/example-5-2"]) == 0
    out = capsys.readouterr().out
    assert "rank: common-fixed-point-unique" in out
    assert "(1, 2)" in out


def test_cli_verify_machine(capsys):
    assert main(["verify", "fixtures/example-5-2", "--report", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rank"] == "common-fixed-point-unique"
    assert doc["verdicts"]["d"]["witness"] == "(1, 2)"
    assert doc["common_fixed_points"] == ["0"]


@pytest.mark.parametrize("k", [0.5, 0.9, 0.99])
def test_cli_verify_catalog_one_fails(tmp_path, capsys, k):
    doc = ex52_doc()
    doc["contraction"] = {"kind": "catalog", "id": "I", "params": {"k": k}}
    assert main(["verify", write(tmp_path, doc), "--report", "machine"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["verdicts"]["d"]["status"] == "fails"
    assert out["verdicts"]["d"]["witness"] == "(1, 2)"


def test_cli_truncated_file(tmp_path, capsys):
    text = (FIXTURE_DIR / "example-5-2.json").read_text()
    assert main(["verify", write(tmp_path, text[: len(text) // 2])]) == 2
    assert "input error" in capsys.readouterr().err


def test_cli_missing_file(capsys):
    assert main(["verify", "/nonexistent/instance.json"]) == 2


def test_cli_solve(capsys):
    assert main(["solve", "fixtures/example-5-2", "--report", "machine"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["coincidence"] == "0.5"
    assert out["common_fixed_point"] == "0"
    assert out["bounds_hold"]


def test_cli_solve_bad_start(capsys):
    # (g 2, T 2) = (2, 1) is not related
    assert main(["solve", "fixtures/example-5-2", "--x0", "2"]) == 1


def test_cli_path(capsys):
    assert main(["path", "fixtures/example-5-2", "0", "1", "--report", "machine"]) == 0
    assert json.loads(capsys.readouterr().out)["length"] == 1


def test_cli_urysohn(tmp_path, capsys):
    out_csv = tmp_path / "u.csv"
    assert main(["urysohn", "fixtures/desk-volterra", "--report", "machine", "--output", str(out_csv)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["iterations"] <= 60 and out["sup_error"] <= 5e-3
    assert out_csv.read_text().startswith("t,u")


def test_cli_urysohn_non_convergence(capsys):
    assert main(["urysohn", "fixtures/desk-volterra", "--max-iter", "2"]) == 3
    assert "non-convergence" in capsys.readouterr().err


def test_cli_verify_rejects_urysohn():
    assert main(["verify", "fixtures/desk-volterra"]) == 2


def test_cli_catalog(capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "XVI" in out and "35" in out


def test_cli_verify_continuous(capsys):
    assert main(["verify", "fixtures/example-5-1"]) == 0
    assert "common-fixed-point-unique" in capsys.readouterr().out


def test_cli_fuzz_small(capsys):
    assert main(["fuzz", "--count", "20", "--compat-count", "20"]) == 0
    assert "error-bound violations: 0" in capsys.readouterr().out
