import json

import pytest
from hypothesis import given, strategies as st

from trioscillator.lattice import EXACT, FLOAT, enumerate_lattice, LatticeOperator
from trioscillator.parameters import RahmanParams
from trioscillator.verification import (REGISTRY, SUITES, random_params, registered_ids, residual, run_suite)

SPEC_IDS = {
    "fr.1", "fr.2", "fr.3", "ha.1R", "ha.1L", "ha.2", "ha.3", "ha.4", "ha.5", "fa.1", "fa.2",
    "su2.xy", "su2.yz", "su2.zx", "casimir.spectrum", "ladder.RminusAction", "ladder.LminusAction",
    "ladder.RplusAction", "ladder.LplusAction", "eig.Lambda1", "eig.Lambda2", "eig.hiso", "eig.JZ",
    "eig.tratnik.L1", "eig.tratnik.L2", "eig.tratnik.frakk", "eig.tratnik.hiso", "orth.rahman",
    "rec.propagation", "fiveterm.combination", "fiveterm.eigen", "rec.op1", "rec.op2",
    "rot.identity", "rot.unit",
}


def test_registry_complete():
    ids = registered_ids("all")
    assert len(ids) == len(set(ids)) == len(REGISTRY)
    assert SPEC_IDS <= set(ids)
    for suite in SUITES[:-1]:
        assert registered_ids(suite), suite
    assert sorted(sum((registered_ids(s) for s in SUITES[:-1]), [])) == sorted(ids)


@pytest.mark.parametrize("suite, N, params", [("su2", 3, "2,1,1,1"), ("heisenberg", 2, "3,1,2,5"),
                                              ("orthogonality", 4, "2,1,1,1")])
def test_examples(suite, N, params):
    rep = run_suite(suite, N, params, EXACT)
    assert rep.passed and rep.cases
    assert all(c.residual == 0 for c in rep.cases)


def test_skipped_cases_are_flagged():
    rep = run_suite("heisenberg", 1, "2,1,1,1")
    skipped = [c for c in rep.cases if c.skipped]
    assert [c.id for c in skipped] == ["ha.2"]
    assert skipped[0].to_dict(EXACT)["residual"] is None
    assert "skipped" in rep.summary()


def test_report_json():
    rep = run_suite("fiveterm", 2, "1,2,3,4", FLOAT)
    data = json.loads(rep.to_json({"seed": 7}))
    assert data["mode"] == FLOAT and data["seed"] == 7 and data["pass"]
    assert {c["id"] for c in data["cases"]} == {"fiveterm.combination", "fiveterm.eigen", "fiveterm.nearest"}
    assert all(isinstance(c["residual"], float) for c in data["cases"])


def test_exact_residuals_serialise_as_rationals():
    data = run_suite("functional", 1, "2,1,1,1").to_dict()
    assert [c["residual"] for c in data["cases"]] == ["0", "0", "0"]


def test_residual_detects_difference():
    lat = enumerate_lattice(2)
    a = LatticeOperator.identity(lat)
    assert residual(a, a) == 0
    assert residual(a, a.scale(2)) == 1


def test_input_validation():
    with pytest.raises(ValueError):
        run_suite("nope", 2, "2,1,1,1")
    with pytest.raises(ValueError):
        run_suite("all", 13, "2,1,1,1", EXACT)
    with pytest.raises(ValueError):
        run_suite("all", 2, "2,1,1,1", "double")


def test_random_params_seeded():
    a, b = random_params(10, 5), random_params(10, 5)
    assert a == b and a != random_params(10, 6)
    for p in a:
        assert all(1 <= q <= 9 for q in p.as_tuple())
        assert p.p1 * p.p4 != p.p2 * p.p3


def test_float_tolerance_is_honoured():
    rep = run_suite("eigen-rahman", 10, "3,1,2,5", FLOAT, tolerance=1e-30)
    assert not rep.passed  # rounding noise exceeds an absurd tolerance
    assert run_suite("eigen-rahman", 10, "3,1,2,5", FLOAT).passed


@given(st.sampled_from(["rotation", "fiveterm", "su2", "casimir", "eigen-tratnik"]), st.integers(0, 3),
       st.integers(0, 2**16))
def test_random_sets_pass(suite, N, seed):
    p = random_params(1, seed)[0]
    assert run_suite(suite, N, p, EXACT).passed
