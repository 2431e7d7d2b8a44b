from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trioscillator.errors import BoundaryCoefficientError, LatticeMismatchError, OutOfLatticeError
from trioscillator.lattice import (EXACT, FLOAT, GridFunction, LatticeOperator, check_point, commutator, compose,
                                   enumerate_lattice, grid_from_csv, in_lattice, linear_combination)

from oracles import points


def test_enumeration_order_and_size():
    assert enumerate_lattice(0).points == ((0, 0),)
    assert list(enumerate_lattice(1).points) == [(0, 0), (1, 0), (0, 1)]
    assert enumerate_lattice(4).size == 15


@given(st.integers(0, 30))
def test_size_and_membership(N):
    lat = enumerate_lattice(N)
    assert lat.size == (N + 1) * (N + 2) // 2
    assert len(set(lat.points)) == lat.size
    assert all(in_lattice(x, y, N) for x, y in lat.points)
    assert [lat.index(pt) for pt in lat.points] == list(range(lat.size))
    assert not in_lattice(N + 1, 0, N) and not in_lattice(-1, 0, N)


def test_check_point_raises():
    with pytest.raises(OutOfLatticeError):
        check_point(2, 1, 2)
    with pytest.raises(OutOfLatticeError):
        enumerate_lattice(2).index((0, 3))


def _grid(N, mode=EXACT):
    return GridFunction.from_function(enumerate_lattice(N), lambda x, y: Fraction(x + 2 * y, 3), mode)


def test_identity_and_zero():
    f = _grid(2)
    lat = f.lattice
    assert (LatticeOperator.identity(lat) @ f).equals(f)
    assert (LatticeOperator.zero(lat, lat) @ f).is_zero()
    assert (LatticeOperator.identity(lat) @ LatticeOperator.identity(lat)).equals(LatticeOperator.identity(lat))


def test_csv_round_trip():
    f = _grid(3)
    g = grid_from_csv(f.to_csv())
    assert g.equals(f)
    assert f.to_csv().splitlines()[0] == "x,y,re,im"


def test_float_conversion():
    f = _grid(2)
    assert np.allclose(f.to_float().values, [float(v) for v in f.values])
    assert (f - f).is_zero()


def test_stencil_boundary_assertion():
    lat = enumerate_lattice(2)
    # coefficient 1 towards (x+1, y) is nonzero on the hypotenuse
    with pytest.raises(BoundaryCoefficientError):
        LatticeOperator.from_stencil(lat, lat, lambda x, y: {(x + 1, y): 1})
    op = LatticeOperator.from_stencil(lat, lat, lambda x, y: {(x + 1, y): 2 - x - y})
    assert op.nnz == 3


def test_ill_typed_composition():
    a = LatticeOperator.identity(enumerate_lattice(2))
    b = LatticeOperator.identity(enumerate_lattice(3))
    with pytest.raises(LatticeMismatchError, match="T_"):
        compose(a, b)
    with pytest.raises(LatticeMismatchError):
        a @ _grid(3)
    with pytest.raises(LatticeMismatchError):
        a @ _grid(2, FLOAT)


def test_commutator_and_linear_combination():
    lat = enumerate_lattice(2)
    diag = LatticeOperator.from_stencil(lat, lat, lambda x, y: {(x, y): x})
    shift = LatticeOperator.from_stencil(lat, lat, lambda x, y: {(x + 1, y): 2 - x - y})
    c = commutator(diag, shift)
    expected = linear_combination([(1, diag @ shift), (-1, shift @ diag)])
    assert c.equals(expected)
    assert not c.is_zero()
    assert c.to_float().max_abs() == pytest.approx(float(c.max_abs()))


def test_coo_export_header():
    op = LatticeOperator.identity(enumerate_lattice(1))
    lines = op.to_coo_csv().splitlines()
    assert lines[0] == "row,col,re,im" and len(lines) == 4


@given(st.integers(0, 6), st.lists(st.integers(-5, 5), min_size=28, max_size=28))
def test_apply_matches_dense(N, vals):
    lat = enumerate_lattice(N)
    f = GridFunction(lat, vals[:lat.size])
    op = LatticeOperator.from_stencil(lat, lat, lambda x, y: {(x, y): x - y, (x - 1, y): x})
    dense = op.to_float().todense()
    assert np.allclose(dense @ np.array(vals[:lat.size], dtype=float), (op @ f).to_float().values)
    assert list(lat.points) == points(N)
