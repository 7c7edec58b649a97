import io
import json
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from hopftr.cli import run

SCHEMA = json.loads((pathlib.Path(__file__).parents[1] / "docs" / "schema.json").read_text())


def call(*argv):
    buf = io.StringIO()
    result, code = run(list(argv), buf)
    return buf.getvalue(), code


def call_json(*argv):
    text, code = call(*argv)
    data = json.loads(text)
    jsonschema.validate(data, SCHEMA)
    return data, code


COMMANDS = [
    ("enumerate", "--family", "Y", "--n", "3"),
    ("enumerate", "--family", "EO", "--n", "2", "--g", "1"),
    ("enumerate", "--family", "Xg", "--n", "0", "--g", "2"),
    ("product", "<1>", "<1 2>"),
    ("product", "<1 2> | 1~2", "<1>"),
    ("coproduct", "<1 <2 3>> | 2~3"),
    ("coproduct", "--reduced", "<1 2>"),
    ("coproduct", "--straddle", "drop", "<1 2> | 1~2"),
    ("antipode", "<<1 2> 3>"),
    ("verify-axioms", "--max-leaves", "3", "--max-loops", "0"),
    ("verify-axioms", "--max-leaves", "4", "--max-loops", "1"),
    ("recursion", "--genus", "1", "--points", "2"),
    ("recursion", "--curve", "y: 1,1", "--genus", "0", "--points", "4", "--mode", "graph-sum"),
    ("compare", "--curve", "airy", "--genus", "1", "--points", "1"),
    ("coefficients", "--genus", "0", "--points", "3", "--mode", "proof"),
    ("coefficients", "--genus", "1", "--points", "2", "--verify"),
    ("coefficients", "--genus", "1", "--points", "3"),
    ("resolve-ambiguities",),
    ("product", "<1 2"),
    ("enumerate", "--family", "Q", "--n", "1"),
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(a))
def test_output_validates_and_is_deterministic(argv):
    first, code1 = call(*argv)
    second, code2 = call(*argv)
    assert first == second and code1 == code2
    data = json.loads(first)
    jsonschema.validate(data, SCHEMA)
    assert code1 == {"ok": 0, "violation": 2, "error": 1}[data["status"]]


def test_enumerate_example():
    data, code = call_json("enumerate", "--family", "Y", "--n", "3")
    assert code == 0 and data["payload"]["count"] == 5


def test_product_example():
    data, code = call_json("product", "<1>", "<1 2>")
    assert code == 0
    assert data["payload"]["text"] == "<1 <2 3>> + <<1 2> 3>"


def test_product_text_mode():
    text, code = call("--text", "product", "<1>", "<1 2>")
    assert code == 0
    assert text.splitlines() == ["status: ok", "<1 <2 3>> + <<1 2> 3>"]
    assert call("product", "<1>", "<1 2>", "--text")[0] == text


def test_compare_example():
    data, code = call_json("compare", "--curve", "airy", "--genus", "1", "--points", "1")
    assert code == 0 and data["payload"]["equal"] is True
    assert data["payload"]["direct"]["text"] == data["payload"]["graph_sum"]["text"] == "1/16*z0^-4"


def test_violation_carries_counterexample():
    data, code = call_json("verify-axioms", "--max-leaves", "4", "--max-loops", "1")
    assert code == 2 and data["status"] == "violation"
    bad = [law for law in data["payload"]["laws"] if not law["ok"]]
    assert bad and all(law["counterexample"] for law in bad)
    assert data["diagnostics"]


def test_coefficient_violation():
    data, code = call_json("coefficients", "--genus", "1", "--points", "3")
    assert code == 2
    assert any("3/56" in d for d in data["diagnostics"])


def test_resolve_verdicts():
    data, code = call_json("resolve-ambiguities")
    verdicts = {v["question"]: v for v in data["payload"]["verdicts"]}
    assert code == 0
    assert verdicts["a_2 at genus 0, k = 4"]["verdict"] == "proof"
    assert verdicts["handle coefficient b at genus 2, k = 0"]["verdict"] == "neither"


@pytest.mark.parametrize("argv,kind", [
    (("product", "<1 2", "<1>"), "GraphSyntaxError"),
    (("product", "<1 2>"), "usage"),
    (("frobnicate",), "usage"),
    (("recursion", "--genus", "4", "--points", "1"), "work-limit"),
    (("coproduct", "<1 2> | 1~3"), "GraphSyntaxError"),
])
def test_errors(argv, kind):
    data, code = call_json(*argv)
    assert code == 1 and data["status"] == "error"
    assert data["payload"]["error"] == kind


def test_work_limit_env(monkeypatch):
    monkeypatch.setenv("HOPF_TR_MAX_WORK", "10")
    data, code = call_json("enumerate", "--family", "Y", "--n", "6")
    assert code == 1 and data["payload"]["error"] == "work-limit"


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "hopftr.cli", "product", "<1>", "<1 2>"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert json.loads(out.stdout)["payload"]["text"] == "<1 <2 3>> + <<1 2> 3>"
