import json

import pytest

import hqm


def test_dimension_formula():
    assert hqm.fspace_dim(3, 2) == 9
    assert [hqm.fspace_dim(4, g) for g in range(5)] == [1, 16, 36, 16, 1]


def test_field_and_sl2():
    info = hqm.field_info(3)
    assert info["disc"] == 3 and len(info["units"]) == 6
    assert hqm.sl2_check(n=2)
    assert hqm.sl2_check(gram=[[1, 0], [0, 3]])


def test_completed_series_is_modular():
    rep = hqm.modularity_check([[1]], kind="completed", tau="i")
    assert rep["pass"] and rep["residual"] < 1e-8
    bare = hqm.modularity_check([[1]], kind="weighted", tau="i")
    assert not bare["pass"] and bare["residual"] > 1e-2


def test_qexp_shape():
    q = hqm.qexp([[1]], trunc=3)
    assert q["meta"]["weight"] == 3
    assert q["meta"]["n_compatible"]
    values = {(tuple(c["nu"]), c["N"][0][0]): c["value"] for c in q["coefficients"]}
    assert values[((0,), "1")] == "4"


def test_boundary():
    gram = [[0, "2*w", 0], ["-2*w", 0, 0], [0, 0, 1]]
    a = hqm.boundary_analyze(gram)
    assert a["r_J"] == 4 and a["M_gram"] == [["1"]]
    c = hqm.boundary_correct([[0, "2*w", 0, 0], ["-2*w", 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], [[2]])
    assert c["supported"] and c["terms"][0]["coefficient"] == "24"


def test_errors():
    with pytest.raises(ValueError):
        hqm.field_info(4)
    with pytest.raises(ValueError):
        hqm.run("nope")
    assert "modularity check" in hqm.commands()


def test_deterministic():
    a = hqm.run("qexp", {"kind": "corrected", "gram": [[1, 0], [0, 1]], "test_classes": True}, trunc=5)
    b = hqm.run("qexp", {"kind": "corrected", "gram": [[1, 0], [0, 1]], "test_classes": True}, trunc=5, workers=3)
    assert json.dumps(a) == json.dumps(b)
