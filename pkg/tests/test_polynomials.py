import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trioscillator.errors import OutOfLatticeError
from trioscillator.lattice import EXACT, FLOAT, enumerate_lattice
from trioscillator.parameters import RahmanParams, derive_params
from trioscillator.polynomials import (PolyIndex, all_indices, binomial_weight, hermite, krawtchouk1, norm_I,
                                       normalization, pochhammer, rahman_eval, rahman_eval_full_sum,
                                       rahman_eval_grid_recurrence, rahman_grid, rahman_normalized, tratnik_eval,
                                       tratnik_grid, trinomial_weight, weight_grid)

import oracles

param_sets = st.sampled_from(["2,1,1,1", "3,1,2,5", "1,2,3,4", "1/2,3,2,5", "5,2,7/3,1"])


def test_pochhammer():
    assert pochhammer(3, 0) == 1 and pochhammer(3, 2) == 12
    assert pochhammer(-2, 3) == 0
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)


def test_krawtchouk_values():
    assert krawtchouk1(0, 3, Fraction(1, 3), 5) == 1
    assert krawtchouk1(1, 2, Fraction(1, 2), 4) == 0
    for x in range(6):
        assert krawtchouk1(1, x, Fraction(2, 7), 5) == -5 + Fraction(7, 2) * x
    with pytest.raises(OutOfLatticeError):
        krawtchouk1(1, 6, Fraction(1, 2), 5)


@given(st.integers(0, 7).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N), st.integers(0, N))),
       st.fractions(Fraction(1, 10), Fraction(9, 10), max_denominator=12))
def test_krawtchouk_matches_hypergeometric(Nnx, p):
    N, n, x = Nnx
    assert krawtchouk1(n, x, p, N) == oracles.rising(-N, n) * oracles.krawtchouk(n, x, p, N)


@pytest.mark.parametrize("N", [3, 5])
def test_krawtchouk_orthogonal(N):
    p = Fraction(2, 5)
    for a in range(N + 1):
        for b in range(a):
            assert sum(binomial_weight(x, p, N) * krawtchouk1(a, x, p, N) * krawtchouk1(b, x, p, N)
                       for x in range(N + 1)) == 0


def test_rahman_closed_form_and_example(d2111):
    assert rahman_eval((1, 0, 2), d2111, 1, 0) == Fraction(11, 20)
    for N in (1, 3, 5):
        for x, y in enumerate_lattice(N).points:
            assert rahman_eval((1, 0, N), d2111, x, y) == 1 - (d2111.u1 * x + d2111.v1 * y) / N
    assert rahman_grid((0, 0, 4), d2111).equals(rahman_grid((0, 0, 4), d2111).scale(0) + _ones(4))


def _ones(N):
    from trioscillator.lattice import GridFunction
    return GridFunction.constant(enumerate_lattice(N), 1)


def test_rahman_matches_oracle(named):
    p = named.p.as_tuple()
    for idx in all_indices(4):
        for x, y in enumerate_lattice(4).points:
            assert rahman_eval(idx, named, x, y) == oracles.rahman(p, idx.m, idx.n, 4, x, y)


def test_truncated_equals_full_sum(d3125):
    for idx in all_indices(3):
        for x, y in enumerate_lattice(3).points:
            assert rahman_eval(idx, d3125, x, y) == rahman_eval_full_sum(idx, d3125, x, y)


@pytest.mark.parametrize("idx, params", [((1, 0, 2), "2,1,1,1"), ((2, 1, 4), "3,1,2,5")])
def test_recurrence_propagation_examples(idx, params):
    d = derive_params(RahmanParams.parse(params))
    assert rahman_eval_grid_recurrence(idx, d).equals(rahman_grid(idx, d))


@given(param_sets, st.integers(0, 5).flatmap(lambda N: st.tuples(st.integers(0, N), st.integers(0, N), st.just(N))))
def test_recurrence_propagation_property(text, mnN):
    m, n, N = mnN
    if m + n > N:
        return
    d = derive_params(RahmanParams.parse(text))
    assert rahman_eval_grid_recurrence((m, n, N), d).equals(rahman_grid((m, n, N), d))


def test_float_mode_agrees(named):
    for idx in all_indices(5):
        ex = rahman_grid(idx, named, EXACT).to_float().values
        fl = rahman_grid(idx, named, FLOAT).values
        assert np.allclose(ex, fl, rtol=1e-12, atol=1e-12)


def test_index_validation():
    with pytest.raises(ValueError):
        PolyIndex(2, 1, 2)
    with pytest.raises(ValueError):
        PolyIndex(-1, 0, 2)
    with pytest.raises(OutOfLatticeError):
        rahman_eval((1, 0, 2), derive_params((2, 1, 1, 1)), 2, 1)


def test_trinomial_weight(d2111):
    assert trinomial_weight(1, 1, 2, d2111.eta1, d2111.eta2) == Fraction(25, 54)
    assert trinomial_weight(1, 1, 2, d2111.eta1, d2111.eta2) == oracles.trinomial(1, 1, 2, d2111.eta1, d2111.eta2)
    with pytest.raises(ValueError):
        trinomial_weight(0, 0, 1, Fraction(1, 2), Fraction(1, 2))
    # log-space branch at large N agrees with direct evaluation
    x, y, N = 90, 70, 160
    direct = float(oracles.trinomial(x, y, N, d2111.eta1, d2111.eta2))
    assert trinomial_weight(x, y, N, d2111.eta1, d2111.eta2, FLOAT) == pytest.approx(direct, rel=1e-10)


@given(param_sets, st.integers(0, 8))
def test_weight_sums_to_one(text, N):
    d = derive_params(RahmanParams.parse(text))
    w = weight_grid(N, d)
    assert sum(w.values) == 1
    assert all(v > 0 for v in w.values)


def test_orthogonality_against_norm(named):
    N = 4
    w = weight_grid(N, named)
    grids = {(i.m, i.n): rahman_grid(i, named) for i in all_indices(N)}
    for a in all_indices(N):
        for b in all_indices(N):
            ip = sum(wv * ka * kb for wv, ka, kb in zip(w.values, grids[(a.m, a.n)].values, grids[(b.m, b.n)].values))
            assert ip == (norm_I(a, named) if a == b else 0)


def test_normalization_invariant(named):
    for idx in all_indices(5):
        c = normalization(idx, named)
        assert c.alpha_sq * c.normI == 2 ** (idx.m + idx.n) * math.factorial(idx.m) * math.factorial(idx.n)
        assert c.alpha ** 2 == pytest.approx(float(c.alpha_sq), rel=1e-12)
    khat, _ = rahman_normalized((1, 1, 5), named)
    w = weight_grid(5, named, FLOAT).values
    assert np.sum(w * np.abs(khat.values) ** 2) == pytest.approx(4.0, rel=1e-10)


def test_tratnik_examples(d2111):
    assert tratnik_grid(0, 0, d2111, 3).equals(_ones(3))
    for x, y in enumerate_lattice(2).points:
        assert tratnik_eval(1, 0, x, y, d2111, 2) == 1 - Fraction(9, 10) * x
    assert tratnik_eval(1, 0, 1, 0, d2111, 2) == Fraction(1, 10)


def test_tratnik_orthogonal(named):
    N = 4
    w = weight_grid(N, named).values
    idxs = [(i.m, i.n) for i in all_indices(N)]
    grids = {ij: tratnik_grid(*ij, named, N).values for ij in idxs}
    for a in idxs:
        for b in idxs:
            ip = sum(wv * u * v for wv, u, v in zip(w, grids[a], grids[b]))
            assert (ip == 0) == (a != b)


def test_hermite():
    assert hermite(2, 1) == 2
    assert hermite(3, 0.5) == pytest.approx(8 * 0.125 - 12 * 0.5)
    nodes, weights = np.polynomial.hermite.hermgauss(40)
    for m in range(5):
        for n in range(5):
            val = np.sum(weights * hermite(m, nodes) * hermite(n, nodes)) / math.sqrt(math.pi)
            want = 2 ** n * math.factorial(n) if m == n else 0.0
            assert val == pytest.approx(want, abs=1e-10)
