import os

import pytest

import web4


def corpus(name):
    with open(os.path.join(web4.corpus_dir(), name + ".web")) as f:
        return f.read()


def test_render_folds_exponent_chains():
    assert web4.render("2^3^2") == "2^9"
    assert web4.render("x+y*2") == "(x + (y * 2))"


def test_exact_geometric_series():
    doc = web4.jet("1/(1 - x)", 0, 0, 3, backend="rational")
    assert [doc["coeffs"][f"{k},0"] for k in range(4)] == ["1", "1", "1", "1"]
    assert doc["coeffs"]["0,1"] == "0"


def test_parallel_web_invariants():
    doc = web4.invariants(corpus("parallel"), "0", "0")
    assert doc["invariants"]["values"]["a"] == 2
    assert doc["labels"] == ["Parallelizable", "NW", "LinearizabilityConditionsHold"]


def test_float_point_arguments():
    doc = web4.invariants(corpus("mw1_logistic"), 0.3, 0.2)
    assert "MW_1" in doc["labels"]


def test_classify_with_grid():
    doc = web4.classify(corpus("apw1_affine"), grid=(3, 2))
    assert doc["aggregate"]["labels"] == ["APW_1"]
    assert len(doc["points"]) == 6


def test_errors():
    with pytest.raises(web4.WebError, match="EmptyAdmissibleSet"):
        web4.classify(corpus("duplicate"))
    with pytest.raises(web4.WebError, match="general position violated: foliations 1,4"):
        web4.invariants(corpus("duplicate"), "0.5", "0.25")
    with pytest.raises(web4.WebError, match="InvalidSpec"):
        web4.invariants("u1 = \"x\"\n", "0", "0")
    with pytest.raises(web4.ParseError):
        web4.render("x + z")


def test_verify_suite():
    result = web4.verify("parallel")
    assert result["passed"]
    assert "jets" in web4.suite_names()
