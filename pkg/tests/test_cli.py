import io
import json

import pytest

from plie.cli import run
from plie.fp import InvalidModulus
from plie.io import (
    CORPUS,
    ParseError,
    UndeclaredName,
    algebra_from_dict,
    algebra_to_dict,
    corpus_path,
    parse_algebra,
)
from plie.lie import RestrictedLieAlgebra


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, payload, name="alg.json"):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


def test_parse_examples(tmp_path):
    L = parse_algebra(write(tmp_path, {"p": 2, "basis": ["x"], "brackets": {}, "pmap": {}}))
    assert L == RestrictedLieAlgebra.abelian(2, ["x"])
    H = parse_algebra(write(tmp_path, {"p": 2, "basis": ["x", "y", "z"], "brackets": {"x,y": {"z": 1}}, "pmap": {}}))
    assert H == parse_algebra(corpus_path("heisenberg_p2"))
    with pytest.raises(InvalidModulus):
        parse_algebra(write(tmp_path, {"p": 4, "basis": ["x"], "brackets": {}, "pmap": {}}))


@pytest.mark.parametrize(
    "payload,error",
    [
        ("{not json", ParseError),
        ([1, 2], ParseError),
        ({"basis": ["x"]}, ParseError),
        ({"p": 3, "basis": ["x", "x"]}, ParseError),
        ({"p": 3, "basis": ["x", "y"], "brackets": {"y,x": {"x": 1}}}, ParseError),
        ({"p": 3, "basis": ["x", "y"], "brackets": {"x,x": {"x": 1}}}, ParseError),
        ({"p": 3, "basis": ["x", "y"], "brackets": {"x,w": {"x": 1}}}, UndeclaredName),
        ({"p": 3, "basis": ["x", "y"], "pmap": {"x": {"q": 1}}}, UndeclaredName),
        ({"p": 3, "basis": ["x"], "pmap": {"x": {"x": 1.5}}}, ParseError),
        ({"p": 3, "basis": ["x"], "extra": 1}, ParseError),
    ],
)
def test_parse_errors(tmp_path, payload, error):
    with pytest.raises(error):
        parse_algebra(write(tmp_path, payload))


def test_coefficients_reduced_and_omissions_zero():
    L = algebra_from_dict({"p": 3, "basis": ["a", "b"], "brackets": {"a,b": {"a": 7, "b": -1}}})
    assert L.structure[0, 1].tolist() == [1, 2]
    assert not L.pmap_table.any()


@pytest.mark.parametrize("name", CORPUS)
def test_dict_roundtrip(name):
    L = parse_algebra(corpus_path(name))
    assert algebra_from_dict(algebra_to_dict(L)) == L


def test_check_sl2_text():
    code, out, _ = invoke("check", str(corpus_path("sl2_p5")))
    assert code == 0
    assert "all axioms hold" in out


def test_check_mutated_heisenberg(tmp_path):
    path = write(tmp_path, {"p": 2, "basis": ["x", "y", "z"], "brackets": {"x,y": {"z": 1}}, "pmap": {"x": {"y": 1}}})
    code, out, _ = invoke("check", path, "--format", "json")
    assert code == 1
    report = json.loads(out)
    restricted = next(c for c in report["checks"] if c["name"] == "restrictedness")
    assert restricted["failures"][0]["basis"] == "x"
    assert any(any(row) for row in restricted["failures"][0]["residual"])


def test_check_broken_jacobi():
    code, out, _ = invoke("check", str(corpus_path("broken_jacobi_p3")), "--format", "json")
    assert code == 1
    jacobi = next(c for c in json.loads(out)["checks"] if c["name"] == "jacobi")
    assert jacobi["failures"][0]["triple"] == ["a", "b", "c"]


def test_free_json():
    code, out, _ = invoke("free", "--p", "2", "--rank", "1", "--max-degree", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)["dims"] == [1, 1]


def test_free_oracle():
    code, out, _ = invoke("free", "--p", "3", "--rank", "2", "--max-degree", "6", "--oracle", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["dims"] == report["witt_oracle_cross_check"] == [2, 1, 4, 3, 6, 10]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["free", "--p", "2"],
        ["free", "--p", "4", "--rank", "1", "--max-degree", "2"],
        ["check", "/nonexistent/file.json"],
        ["check"],
        ["check", "x.json", "--format", "xml"],
    ],
)
def test_usage_errors_exit_2(argv):
    code, _, _ = invoke(*argv)
    assert code == 2


def test_size_limit_exit_2():
    code, _, err = invoke("env", str(corpus_path("sl2_p5")), "--size-limit", "100")
    assert code == 2
    assert "size limit" in err


def test_truncation_too_small_exit_2():
    code, _, err = invoke("roundtrip", str(corpus_path("sl2_p5")), "--max-degree", "3")
    assert code == 2


def test_env_table():
    code, out, _ = invoke("env", str(corpus_path("abelian_p2_xx_eq_x")), "--table", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["dimension"] == 2
    assert report["table"] == [[{"1": 1}, {"x": 1}], [{"x": 1}, {"x": 1}]]


def test_env_detects_non_restricted_input():
    code, out, _ = invoke("env", str(corpus_path("broken_sl2_p5_pmap")), "--format", "json", "--samples", "300")
    assert code == 1
    assert not json.loads(out)["checks"][0]["passed"]


def test_primitives_heisenberg():
    code, out, _ = invoke("primitives", str(corpus_path("heisenberg_p2")), "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["checks"][0]["dim_primitives"] == 3


@pytest.mark.parametrize("command", ["roundtrip", "em-check", "sandwich"])
def test_monadic_commands_fail_on_broken_input(command):
    code, out, _ = invoke(command, str(corpus_path("broken_heisenberg_p2_pmap")), "--format", "json")
    assert code == 1
    assert json.loads(out)["status"] == "fail"


@pytest.mark.parametrize("command", ["check", "env", "primitives", "roundtrip", "em-check", "sandwich"])
@pytest.mark.parametrize("name", ["abelian_p2_xx_eq_x", "heisenberg_p2", "heisenberg_p3"])
def test_commands_pass_and_reports_roundtrip(command, name):
    code, out, _ = invoke(command, str(corpus_path(name)), "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "pass"
    assert json.loads(json.dumps(report, indent=2, sort_keys=True) + "\n") == report
    assert json.dumps(report, indent=2, sort_keys=True) + "\n" == out
    if command in ("roundtrip", "em-check", "sandwich"):
        assert report["max_degree"] == 4


def test_text_output_reports_truncation():
    code, out, _ = invoke("em-check", str(corpus_path("heisenberg_p2")))
    assert code == 0
    assert "max_degree: 4" in out and "status: PASS" in out
