import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trioscillator.continuum import (CONVERGED_FLOOR, ConvergenceRecord, TestPolynomial, admissible_radius,
                                     convergence, default_samples, estimate_order, forward, hermite_limit_error,
                                     hermite_sign_agreement, inverse, operator_limit_residual,
                                     scaled_ladder_consistency, scaled_ladder_limit_error, to_lattice,
                                     weight_gaussian_error)
from trioscillator.errors import OutOfLatticeError
from trioscillator.parameters import RahmanParams, derive_params

param_sets = st.sampled_from(["2,1,1,1", "3,1,2,5", "1,2,3,4", "1/2,3,2,5"])


def test_origin_maps_to_mean(d2111):
    c = forward(0, 0, 144, d2111)
    assert (round(c.x), round(c.y)) == (80, 60)
    pt = to_lattice(0, 0, 144, d2111)
    assert (pt.x, pt.y) == (80, 60) and not pt.snapped


@given(param_sets, st.floats(-2, 2), st.floats(-2, 2), st.integers(10, 10**6))
def test_inverse_round_trip(text, s, t, N):
    d = derive_params(RahmanParams.parse(text))
    c = forward(s, t, N, d)
    s2, t2 = inverse(c.x, c.y, N, d)
    assert s2 == pytest.approx(s, abs=1e-7) and t2 == pytest.approx(t, abs=1e-7)


def test_scaling_whitens_the_weight(named):
    # the trinomial covariance, pulled back through the scaling, is I/2
    e1, e2 = float(named.eta1), float(named.eta2)
    cov = np.array([[e1 * (1 - e1), -e1 * e2], [-e1 * e2, e2 * (1 - e2)]])
    C = np.array(named.coords_matrix)
    assert np.allclose(C.T @ np.linalg.inv(cov) @ C, 2 * np.eye(2), atol=1e-12)


def test_out_of_lattice(d2111):
    with pytest.raises(OutOfLatticeError, match="keep"):
        to_lattice(5, 5, 16, d2111)
    r = admissible_radius(64, d2111)
    assert 0 < r < 1
    assert to_lattice(1, 1, 64, d2111).snapped


def test_estimate_order_synthetic():
    Ns = [64, 256, 1024]
    assert estimate_order((Ns, [N ** -0.5 for N in Ns])) == pytest.approx(-0.5)
    assert estimate_order((Ns, [3 / N for N in Ns])) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        estimate_order(([1, 2], [1.0, 0.5]))


def test_record_bookkeeping():
    rec = ConvergenceRecord("weight", "w")
    for N, e in ((64, 0.4), (256, 0.2), (1024, 0.1)):
        rec.add(N, e)
    assert rec.monotone() and rec.strictly_decreasing() and rec.improvement() == pytest.approx(4)
    assert rec.order == pytest.approx(-0.5)
    assert rec.to_csv().splitlines()[0] == "N,max_error,est_order"
    assert json.loads(rec.to_json({"seed": 1}))["seed"] == 1
    with pytest.raises(ValueError):
        rec.add(512, 0.1)
    flat = ConvergenceRecord("x", "x", [64, 256, 1024], [1e-13, 3e-12, 2e-11])
    assert flat.converged and flat.monotone() and flat.order is None


def test_weight_error_ratios(d2111):
    errs = [weight_gaussian_error(N, d2111) for N in (64, 256, 1024)]
    for a, b in zip(errs, errs[1:]):
        assert 1.6 <= a / b <= 2.6
    # at the origin the scaled weight tends to 1
    assert weight_gaussian_error(4096, d2111, [(0, 0)]) < 0.02


def test_hermite_limit_degree_one_is_exact(named):
    # K_hat_{1,0} and K_hat_{0,1} are exactly 2s and 2t at every N
    for N in (64, 1024):
        assert hermite_limit_error(1, 0, N, named) < CONVERGED_FLOOR
        assert hermite_limit_error(0, 1, N, named) < CONVERGED_FLOOR


def test_hermite_limit_decays(d2111):
    e = [hermite_limit_error(2, 1, N, d2111) for N in (64, 256, 1024)]
    assert e[0] > e[1] > e[2]
    with pytest.raises(ValueError):
        hermite_limit_error(5, 0, 64, d2111)


def test_sign_agreement(d2111):
    sc = hermite_sign_agreement(1, 1, 1024, d2111)
    assert sc.total > 0 and sc.all_agree


def test_test_polynomial_parsing():
    assert str(TestPolynomial.parse("s^2 + s*t")) == "s**2 + s*t"
    for bad in ("sin(s)", "s^4", "s + q"):
        with pytest.raises(ValueError):
            TestPolynomial.parse(bad)


@pytest.mark.parametrize("which", ["Lambda1", "Lambda2", "L2"])
def test_operator_limit_low_degree(named, which):
    for f in ("1", "s", "t", "2 - 3*s + t"):
        assert operator_limit_residual(which, 256, named, f) < CONVERGED_FLOOR
    rec = convergence("operator", (64, 256, 1024), named, which=which, testfn="s*t")
    assert rec.strictly_decreasing()


def test_lambda1_quadratic_limit(d2111):
    # D s^2 = -1 + 2 s^2 for Lambda1; the residual shrinks with N
    e = [operator_limit_residual("Lambda1", N, d2111, "s^2") for N in (64, 256, 1024)]
    assert e[0] > e[1] > e[2]


def test_scaled_ladders(d2111):
    # scaled lowering K_hat_{1,0} -> K_hat_{0,0} = 1 holds exactly at finite N
    assert scaled_ladder_limit_error("R", "-", 64, d2111, 1, 0) < CONVERGED_FLOOR
    e = [scaled_ladder_limit_error("R", "+", N, d2111, 1, 0) for N in (64, 256, 1024)]
    assert e[0] > e[1] > e[2]
    for side in "RL":
        for direction in "+-":
            assert scaled_ladder_consistency(side, direction, 256, d2111, 1, 1) < 1e-9


def test_default_samples():
    pts = default_samples(3, 2.0)
    assert len(pts) == 9 and (-2.0, -2.0) in pts and (0.0, 0.0) in pts
    assert default_samples(1) == [(0.0, 0.0)]
    with pytest.raises(ValueError):
        default_samples(0)


def test_convergence_dispatch(d2111):
    with pytest.raises(ValueError):
        convergence("bogus", (64,), d2111)
    rec = convergence("ladder", (64, 256), d2111, m=1, n=0, side="L", direction="+")
    assert rec.label.startswith("ladder L+") and len(rec.errors) == 2
    assert math.isfinite(rec.errors[-1])
