import io
import json
import re
import subprocess
import sys

import pytest

from gpd.cli import run
from gpd.models import EXAMPLES, fingerprint, model_from_json

EIGHTH = '{"f":{"pieces":[{"from":"-inf","to":"inf","slope":"0","intercept":"1/8"}]}}'
ZERO = '{"f":{"pieces":[{"from":"-inf","to":"inf","slope":"0","intercept":"0"}]}}'


def times(doc, k):
    d = json.loads(doc)
    d["times"] = k
    return json.dumps(d)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def no_decimals(obj):
    if isinstance(obj, dict):
        return all(no_decimals(v) for k, v in obj.items() if k != "engine")
    if isinstance(obj, list):
        return all(no_decimals(v) for v in obj)
    if isinstance(obj, str):
        return not re.fullmatch(r"-?\d*\.\d+(e-?\d+)?", obj)
    return not isinstance(obj, float)


def report(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    doc = json.loads(out)
    assert no_decimals(doc)
    return doc


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_example_round_trip(name, tmp_path):
    code, out, _ = call("example", name)
    assert code == 0
    doc = json.loads(out)
    assert fingerprint(model_from_json(doc)) == fingerprint(EXAMPLES[name]())
    path = tmp_path / "m.json"
    path.write_text(out)
    rep = report("check-axioms", "--model", str(path))
    assert rep["verdict"] is True
    assert rep["model"] == fingerprint(EXAMPLES[name]())


def test_mutation_document_fails_its_axiom(tmp_path):
    code, out, _ = call("example", "--mutation", "zero-width")
    doc = json.loads(out)
    assert doc.pop("intended_failure") == "G1"
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    rep = report("check-axioms", "--model", str(path))
    assert rep["verdict"] is False and list(rep["witness"]) == ["G1"]


def test_kernel_reports():
    rep = report("hol", "kernel", "--model", "pradines-1", "--at", "0")
    assert rep["verdict"] == "Z"
    gen = rep["certificate"]["generator"]["word"]
    assert gen["times"] == 8 and len(gen["sections"]) == 1
    for x in ["-2", "-1/2", "1/3", "5"]:
        assert report("hol", "kernel", "--model", "pradines-1", "--at", x)["verdict"] == "trivial"
    assert report("hol", "kernel", "--model", "mobius", "--at", "A:0")["verdict"] == "Z/2"


def test_section_procedure_on_nine_fold_word():
    nine = times(EIGHTH, 9)
    at0 = report("section", "procedure", "--model", "pradines-1", nine, "--at", "0")
    assert at0["verdict"] is False and at0["continuous"]["verdict"] is False
    at1 = report("section", "procedure", "--model", "pradines-1", nine, "--at", "1/2")
    assert at1["verdict"] is True


def test_hol_equal_and_extendible():
    eight = times(EIGHTH, 8)
    assert report("hol", "equal", "--model", "pradines-1", "--at", "0", eight, ZERO)["verdict"] is False
    assert report("hol", "equal", "--model", "pradines-1", "--at", "1", eight, ZERO)["verdict"] is True
    assert report("hol", "extendible", "--model", "pradines-2", "--smoothness", "0")["verdict"] is True
    assert report("hol", "extendible", "--model", "pradines-2", "--smoothness", "1")["verdict"] is False


def test_mono_commands():
    rep = report("mono", "reduce", "--model", "pradines-1", '{"base":"0","letters":["1/16","1/16","-1/16"]}')
    assert rep["verdict"] == {"base": "0", "letters": ["1/16"]}
    star = report("mono", "star", "--model", "pradines-1", "--at", "1")
    assert star["verdict"] == "Z" and star["certificate"]["pairwise_distinct"] is True
    ok = report("mono", "extend", "--model", "pregroupoid-z6", '{"letters":{"0":"0","1":"2","5":"4"}}')
    assert ok["verdict"] is True
    bad = report("mono", "extend", "--model", "pregroupoid-z6", '{"letters":{"0":"0","1":"2","5":"2"}}')
    assert bad["verdict"] is False and bad["witness"]["pair"]


def test_lift_examples():
    assert report("hol", "lift", "--model", "lift-z20")["verdict"] is True
    assert report("hol", "lift", "--model", "lift-z15")["verdict"] is False


def test_text_format():
    code, out, _ = call("hol", "kernel", "--model", "pradines-1", "--at", "0", "--format", "text")
    assert code == 0 and re.search(r"^verdict\s+", out, re.M)


@pytest.mark.parametrize(
    "argv",
    [
        ["hol", "kernel", "--model", "no-such-file.json", "--at", "0"],
        ["hol", "kernel", "--model", "pradines-1", "--at", "0.5"],
        ["section", "procedure", "--model", "pradines-1", "{not json"],
        ["hol", "kernel", "--model", "pradines-1"],
    ],
    ids=["missing-file", "decimal", "bad-json", "missing-at"],
)
def test_input_errors_exit_1(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == ""
    assert "error" in json.loads(err)


def test_usage_error_exits_2():
    assert call("bogus")[0] == 2


def test_stdin_pipeline():
    model = subprocess.run([sys.executable, "-m", "gpd", "example", "pradines-1"], capture_output=True, text=True, check=True)
    proc = subprocess.run(
        [sys.executable, "-m", "gpd", "hol", "kernel", "--at", "0"], input=model.stdout, capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Z"
