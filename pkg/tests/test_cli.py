import io
import json
import subprocess
import sys

import jsonschema
import pytest

from cupform import schemas
from cupform.cli import run
from cupform.exactpoly import form_to_json
from cupform.fixtures import curve_blowup, degenerate_cubic, fermat, fermat_phi, p1_p3, surface_blowup


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out, stderr=io.StringIO())
    return code, json.loads(out.getvalue())


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return {
        "ex": write("ex3_2.json", form_to_json(degenerate_cubic())),
        "fermat3": write("fermat3.json", fermat_phi(3, 3).to_json()),
        "p1p3": write("p1p3.json", p1_p3().to_json()),
        "quad": write("empty-degree-2.json", {"vars": 2, "degree": 2, "terms": []}),
        "curve": write("curve.json", form_to_json(curve_blowup(3, 5))),
        "surface": write("surface.json", form_to_json(surface_blowup(2))),
        "fx": write("fx.json", form_to_json(fermat(3, 1))),
        "spec": write("spec.json", {"k": 1, "a": "2", "R": [{"vars": 1, "degree": 1, "terms": [{"exps": [1], "coef": "5"}]}]}),
        "tensor": write("t.json", {"shape": [2, 2, 2], "entries": ["1", "1", "1", "0", "1", "0", "0", "0"]}),
        "dir": str(tmp_path),
    }


def test_hessian_symbolic_matches_matrix(files):
    code, doc = call("hessian", "--form", files["ex"], "--symbolic")
    assert code == 0
    assert doc["result"]["text"] == [
        ["0", "x1", "0", "0", "0"],
        ["x1", "x0", "0", "x4", "x3"],
        ["0", "0", "0", "x3", "0"],
        ["0", "x4", "x3", "x2", "x1"],
        ["0", "x3", "0", "x1", "0"],
    ]


def test_degree_too_low(files):
    code, doc = call("hessian", "--form", files["quad"], "--symbolic")
    assert code == 1 and doc["error"]["code"] == "DEGREE_TOO_LOW"


def test_candidates_fermat(files):
    code, doc = call("candidates", "--phi", files["fermat3"])
    assert code == 0
    assert doc["result"]["complete"] is True and len(doc["result"]["candidates"]) == 3


def test_exit_codes(files):
    assert call("nope")[0] == 2
    code, doc = call("honest", "--form", '{"vars": 2, "degree": "x"}')
    assert code == 2 and doc["error"]["code"] == "SCHEMA_VIOLATION"
    assert call("honest", "--form", "/does/not/exist.json")[0] == 2
    assert call("honest", "--form", '{"vars": 2, "degree": 3, "terms": [{"exps": [1, 1], "coef": "1"}]}')[1]["error"]["code"] == "DEGREE_MISMATCH"
    code, doc = call("rank-at", "--form", files["ex"], "--point", "[1, 0]")
    assert code == 1 and doc["error"]["code"] == "DIMENSION_MISMATCH"
    assert call("honest", "--form", '{"vars": 1, "degree": 3, "terms": [{"exps": [3], "coef": "0.5"}]}')[0] == 2
    assert call("wf-search", "--form", '{"vars": 2, "degree": 3, "terms": [{"exps": [0, 3], "coef": 1}]}')[1]["error"]["code"] == "NOT_HONEST"


def test_every_report_validates(files):
    runs = [
        ("hessian", "--form", files["ex"], "--point", '["1", 0, 0, 0, 0]'),
        ("honest", "--form", files["ex"]),
        ("nondegenerate", "--form", files["ex"]),
        ("rank-at", "--form", files["curve"], "--point", "[1, 0]"),
        ("wf-member", "--form", files["ex"], "--point", "[4, 0, 1, 0, 2]"),
        ("wf-search", "--form", files["ex"], "--starts", "4", "--seed", "3"),
        ("normal-form", "--form", files["ex"], "--point", "[1, 0, 0, 0, 0]"),
        ("peel", "--form", files["curve"]),
        ("build-form", "--phi", files["p1p3"]),
        ("intersection-of", "--form", files["curve"]),
        ("blowup", "--form", files["fx"], "--spec", files["spec"]),
        ("blowup-point", "--form", files["fx"]),
        ("exceptional-rank", "--form", files["surface"], "--k", "2"),
        ("candidates", "--phi", files["p1p3"], "--starts", "6"),
        ("tensor-rank", "--tensor", files["tensor"]),
        ("hyperdet", "--tensor", files["tensor"]),
        ("hyperdet", "--form", json.dumps(form_to_json(form_from_p1p3()))),
        ("paper-examples",),
    ]
    for argv in runs:
        code, doc = call(*argv)
        assert code == 0, (argv, doc)
        jsonschema.validate(doc, schemas.report_schema(argv[0]))


def form_from_p1p3():
    from cupform.geometry import form_from_intersection

    return form_from_intersection(p1_p3())


def test_error_documents_validate(files):
    code, doc = call("hessian", "--form", files["quad"], "--symbolic")
    jsonschema.validate(doc, schemas.ERROR)


def test_specific_results(files):
    assert call("nondegenerate", "--form", files["ex"])[1]["result"]["status"] == "no"
    doc = call("hyperdet", "--form", json.dumps(form_to_json(form_from_p1p3())))[1]["result"]
    assert doc["identically_zero"] and doc["value"] == "0"
    doc = call("blowup-point", "--form", files["fx"])[1]["result"]
    assert doc["a"] == "1" and doc["a_default"] and doc["text"] == "x0^3 + x1^3"
    doc = call("blowup-point", "--form", files["fx"], "--override-a=-3/2")[1]["result"]
    assert doc["a"] == "-3/2" and not doc["a_default"]
    doc = call("blowup", "--form", files["fx"], "--spec", files["spec"])[1]["result"]
    assert doc["text"] == "2*x0^3 + 5*x0^2*x1 + x1^3"
    doc = call("rank-at", "--form", files["curve"], "--point", "[1, 0]")[1]["result"]
    assert doc["rank"] == 2
    doc = call("tensor-rank", "--tensor", files["tensor"])[1]["result"]
    assert doc["lower"] == doc["upper"] == 3


def test_heuristic_flags(files):
    doc = call("wf-search", "--form", files["ex"], "--starts", "4")[1]["result"]
    assert doc["complete"] is False and doc["heuristic"] is True
    doc = call("nondegenerate", "--form", json.dumps(form_to_json(fermat(4, 3))))[1]["result"]
    assert doc["status"] == "inconclusive" and doc["heuristic"] is True


def test_deterministic_bytes(files):
    def raw(*argv):
        out = io.StringIO()
        run(list(argv), stdout=out, stderr=io.StringIO())
        return out.getvalue()

    a = raw("wf-search", "--form", files["ex"], "--seed", "11", "--starts", "5")
    b = raw("wf-search", "--form", files["ex"], "--seed", "11", "--starts", "5")
    assert a == b


def test_seed_env_fallback(files, monkeypatch):
    monkeypatch.setenv("CUPFORM_SEED", "11")
    a = call("wf-search", "--form", files["ex"], "--starts", "5")[1]
    monkeypatch.delenv("CUPFORM_SEED")
    b = call("wf-search", "--form", files["ex"], "--starts", "5", "--seed", "11")[1]
    assert a == b


def test_out_file(files):
    path = files["dir"] + "/report.json"
    code = run(["honest", "--form", files["ex"], "--out", path], stdout=io.StringIO())
    assert code == 0
    with open(path) as fh:
        assert json.load(fh)["result"]["honest"] is True


def test_paper_examples_flag():
    code, doc = call("--paper-examples")
    assert code == 0 and "degenerate_cubic" in doc["result"]["examples"]
    code, doc = call("paper-examples", "p1_p3")
    assert list(doc["result"]["examples"]) == ["p1_p3"]
    assert call("paper-examples", "nope")[0] == 2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "cupform.cli", "paper-examples", "fermat3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema"] == "cupform/1"
