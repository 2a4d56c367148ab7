import io
import json
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from loopforge.cli import GUARD, SCHEMA, main
from loopforge.forms import FormSpec, extended_bracket
from loopforge.loops import GradedElement, build


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, _ = run(*argv)
    return code, json.loads(out)


def write_element(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_build_c2():
    code, doc = run_json("build", "--type", "C2", "--rank", "2", "--window", "2")
    assert code == 0 and doc["schema"] == SCHEMA
    assert [r["dim"] for r in doc["degrees"]] == [10, 5, 10, 5, 10]


def test_build_a1_window_one():
    code, doc = run_json("build", "--type", "A1", "--rank", "2", "--window", "1")
    assert code == 0
    assert [r["degree"] for r in doc["degrees"]] == [-1, 0, 1]
    assert all(r["dim"] == 3 for r in doc["degrees"])
    assert doc["extension"] == {"c": 1, "d0": 1}


def test_build_table_format():
    code, out, _ = run("build", "--type", "C2", "--rank", "2", "--window", "1", "--format", "table")
    assert code == 0
    assert out.splitlines()[0] == f"schema: {SCHEMA}"
    assert "total 20" in out


def test_bad_tag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("build", "--type", "X9")
    assert exc.value.code == 2


def test_guard():
    code, _, err = run("build", "--type", "A1", "--rank", str(GUARD + 1))
    assert code == 2 and "guard" in err
    code, _, _ = run("build", "--type", "A1", "--rank", str(GUARD + 1), "--window", "0", "--no-guard")
    assert code == 0


def test_bracket_end_to_end(tmp_path):
    x = write_element(tmp_path, "x.json", {"1": {"matrix": [[1, 2, "1"]]}})
    y = write_element(tmp_path, "y.json", {"-1": {"matrix": [[2, 1, "1"]]}})
    code, doc = run_json("bracket", "--type", "A1", "--rank", "2", "--window", "2", "--trace-scale", "3", x, y)
    assert code == 0
    L = build("A1", 2, 2)
    lib = extended_bracket(L, FormSpec.make(3), GradedElement.homogeneous(1, {(1, 2): 1}),
                           GradedElement.homogeneous(-1, {(2, 1): 1}))
    assert doc["result"] == L.element_to_json(lib)
    assert doc["result"]["c"] == "3"
    assert doc["result"]["0"]["matrix"] == [[1, 1, "1"], [2, 2, "-1"]]


def test_bracket_with_zero(tmp_path):
    x = write_element(tmp_path, "x.json", {"1": {"matrix": [[1, 2, "1"]]}})
    z = write_element(tmp_path, "z.json", {})
    code, doc = run_json("bracket", "--type", "A1", "--rank", "2", "--window", "2", x, z)
    assert code == 0 and doc["result"] == {"c": "0", "d": "0"}


def test_bracket_window_overflow(tmp_path):
    x = write_element(tmp_path, "x.json", {"2": {"matrix": [[1, 2, "1"]]}})
    y = write_element(tmp_path, "y.json", {"1": {"matrix": [[2, 1, "1"]]}})
    code, doc = run_json("bracket", "--type", "A1", "--rank", "2", "--window", "2", x, y)
    assert code == 3 and doc["degrees"] == [3]
    far = write_element(tmp_path, "far.json", {"5": {"matrix": [[1, 2, "1"]]}})
    code, doc = run_json("bracket", "--type", "A1", "--rank", "2", "--window", "2", far, y)
    assert code == 3 and doc["degrees"] == [5]


def test_bracket_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    y = write_element(tmp_path, "y.json", {"1": {"matrix": [[2, 1, "1"]]}})
    assert run("bracket", "--type", "A1", "--rank", "2", "--window", "2", str(bad), y)[0] == 2
    outside = write_element(tmp_path, "o.json", {"0": {"matrix": [[1, 1, "1"]]}})
    assert run("bracket", "--type", "A1", "--rank", "2", "--window", "2", outside, y)[0] == 2
    missing = str(tmp_path / "missing.json")
    assert run("bracket", "--type", "A1", "--rank", "2", "--window", "2", missing, y)[0] == 2


def test_verify_all_bc2():
    code, doc = run_json("verify", "all", "--type", "BC2", "--rank", "2", "--window", "3", "--trials", "40")
    assert code == 0 and doc["passed"]
    assert [s["suite"] for s in doc["suites"]] == ["center", "forms", "jacobi", "rootdatum", "torus"]


def test_verify_rootdatum_without_type():
    code, doc = run_json("verify", "rootdatum")
    assert code == 0 and doc["passed"]


def test_verify_fault_injection():
    code, doc = run_json("verify", "torus", "--type", "C2", "--rank", "2", "--window", "2", "--inject-fault")
    assert code == 1 and not doc["passed"]
    lt1 = next(c for c in doc["suites"][0]["checks"] if c["name"] == "LT1")
    assert lt1["status"] == "fail" and lt1["witness"]


def test_verify_needs_type():
    assert run("verify", "torus")[0] == 2


def test_derive_examples():
    code, doc = run_json("derive", "--type", "A1", "--rank", "3", "--degree", "0")
    assert code == 0 and doc["solvedDim"] == 3 and doc["verdict"] == "match"
    code, doc = run_json("derive", "--type", "C2", "--rank", "2", "--degree", "1")
    assert code == 0 and doc["verdict"] == "match"
    assert all("d0" not in p for p in doc["predicted"])
    code, doc = run_json("derive", "--type", "B2", "--rank", "2", "--degree", "1")
    assert code == 0 and doc["solvedDim"] == 1


def test_derive_margin_violation():
    code, _, err = run("derive", "--type", "A1", "--rank", "2", "--degree", "2", "--margin", "1")
    assert code == 2 and "margin" in err


def test_spectrum(tmp_path):
    p = write_element(tmp_path, "p.json", {"finite": {"1": "1", "2": "1/2", "3": "1/3", "4": "1/4"}})
    code, doc = run_json("spectrum", p, "--rank", "4", "--scan")
    assert code == 0 and doc["obstruction"]["verdict"] == "distinguishable"
    code, doc = run_json("spectrum", p, "--rank", "4", "--target", "2,3")
    assert doc["eigenvalues"] == [{"target": "e2,3@t^0", "eigenvalue": "1/6"}]
    code, doc = run_json("spectrum", "-", "--rank", "4")
    assert doc["obstruction"]["verdict"] == "inconclusive"
    assert run("spectrum", p, "--target", "9,1")[0] == 2
    assert run("spectrum", p, "--target", "a,b")[0] == 2


def test_outputs_are_byte_identical():
    argv = ("verify", "forms", "--type", "C2", "--rank", "2", "--window", "2", "--seed", "7", "--trials", "30")
    first, second = run(*argv), run(*argv)
    assert first == second
    assert run("build", "--type", "B2", "--rank", "2", "--window", "2") == run("build", "--type", "B2", "--rank", "2", "--window", "2")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "loopforge", "build", "--type", "A1", "--rank", "2", "--window", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["total_dim"] == 9
