"""Large-N behaviour: scaled coordinates, Gaussian weight, Hermite limits.

Lattice points are related to continuum variables by

    x = N eta1 + sqrt(N) (c1 s + c2 t),    y = N eta2 + sqrt(N) (c3 s + c4 t).

Sampling snaps a continuum point (s, t) to the nearest lattice point and
then works with the exact preimage (s*, t*) of that point, so no
interpolation error enters the convergence curves.  Everything here is
float arithmetic; the finite-N identities these limits rest on are checked
exactly in :mod:`trioscillator.verification`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import sympy

from .errors import OutOfLatticeError
from .operators import l2_stencil, ladder_stencil, lambda_stencil
from .parameters import DerivedParams
from .polynomials import PolyIndex, hermite, normalization, rahman_eval, trinomial_weight

DEFAULT_N_LADDER = (64, 256, 1024)
CONVERGED_FLOOR = 1e-8  # errors below this count as converged (rounding level for O(1) values)
LIMIT_OPERATORS = ("Lambda1", "Lambda2", "L2")
CHECKS = ("weight", "hermite", "operator", "ladder")


# coordinates --------------------------------------------------------------

@dataclass(frozen=True)
class ScaledCoords:
    s: float
    t: float
    x: float
    y: float
    mu: float
    nu: float
    N: int


@dataclass(frozen=True)
class LatticeSample:
    """A lattice point (x, y) on T_N with its exact continuum preimage (s, t)."""

    x: int
    y: int
    s: float
    t: float
    N: int
    snapped: bool = False


def forward(s: float, t: float, N: int, d: DerivedParams) -> ScaledCoords:
    mu = d.c1 * s + d.c2 * t
    nu = d.c3 * s + d.c4 * t
    rt = math.sqrt(N)
    return ScaledCoords(s, t, N * float(d.eta1) + rt * mu, N * float(d.eta2) + rt * nu, mu, nu, N)


def inverse(x: float, y: float, N: int, d: DerivedParams) -> tuple[float, float]:
    """(s, t) with forward(s, t) = (x, y)."""
    rt = math.sqrt(N)
    mu = (x - N * float(d.eta1)) / rt
    nu = (y - N * float(d.eta2)) / rt
    det = d.c1 * d.c4 - d.c2 * d.c3
    return (d.c4 * mu - d.c2 * nu) / det, (-d.c3 * mu + d.c1 * nu) / det


def admissible_radius(N: int, d: DerivedParams) -> float:
    """Largest r such that the whole box |s|, |t| <= r maps into the closed triangle."""
    rt = math.sqrt(N)
    e1, e2 = float(d.eta1), float(d.eta2)
    e3 = 1.0 - e1 - e2
    return rt * min(e1 / (abs(d.c1) + abs(d.c2)),
                    e2 / (abs(d.c3) + abs(d.c4)),
                    e3 / (abs(d.c1 + d.c3) + abs(d.c2 + d.c4)))


def to_lattice(s: float, t: float, N: int, d: DerivedParams) -> LatticeSample:
    """Nearest lattice point to (x(s,t), y(s,t)) and its exact preimage.

    A point whose rounding falls just outside T_N but which lies within one
    lattice cell of it is snapped onto the nearest boundary point; anything
    further out is rejected.
    """
    c = forward(s, t, N, d)
    xs, ys = int(round(c.x)), int(round(c.y))
    snapped = False
    if xs < 0 or ys < 0 or xs + ys > N:
        if c.x < -1 or c.y < -1 or c.x + c.y > N + 1:
            raise OutOfLatticeError(
                f"(s, t) = ({s}, {t}) maps to ({c.x:.3f}, {c.y:.3f}), outside T_{N}; "
                f"at this N keep |s|, |t| <= {admissible_radius(N, d):.3f}")
        xs, ys = max(xs, 0), max(ys, 0)
        while xs + ys > N:
            # move along the hypotenuse toward the continuous point
            if c.x - xs < c.y - ys:
                xs -= 1
            else:
                ys -= 1
        snapped = True
    ss, tt = inverse(xs, ys, N, d)
    return LatticeSample(xs, ys, ss, tt, N, snapped)


def default_samples(k: int = 5, radius: float = 1.0) -> list[tuple[float, float]]:
    """k x k grid over |s|, |t| <= radius."""
    if k < 1:
        raise ValueError("k must be >= 1")
    axis = np.linspace(-radius, radius, k) if k > 1 else np.array([0.0])
    return [(float(s), float(t)) for s in axis for t in axis]


def _samples(samples) -> list[tuple[float, float]]:
    return default_samples() if samples is None else [(float(s), float(t)) for s, t in samples]


# records -------------------------------------------------------------------

def _slope(Ns: Sequence[float], errors: Sequence[float]) -> float:
    return float(np.polyfit(np.log(np.asarray(Ns, float)), np.log(np.asarray(errors, float)), 1)[0])


def estimate_order(record) -> float:
    """Least-squares slope of log(error) against log(N); needs >= 3 points."""
    Ns, errors = (record.Ns, record.errors) if isinstance(record, ConvergenceRecord) else record
    if len(Ns) < 3 or len(Ns) != len(errors):
        raise ValueError("order estimation needs at least 3 (N, error) pairs")
    if any(e <= 0 for e in errors):
        raise ValueError("order estimation needs positive errors; a zero error means the quantity "
                         "is already exact at rounding level")
    return _slope(Ns, errors)


@dataclass
class ConvergenceRecord:
    """Max-abs errors of one limit statement along an increasing N ladder."""

    check: str
    label: str
    Ns: list[int] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)

    def add(self, N: int, error: float):
        if self.Ns and N <= self.Ns[-1]:
            raise ValueError(f"N values must increase, got {N} after {self.Ns[-1]}")
        if error < 0 or not math.isfinite(error):
            raise ValueError(f"error must be finite and >= 0, got {error}")
        self.Ns.append(int(N))
        self.errors.append(float(error))

    @property
    def converged(self) -> bool:
        """Every error is already at rounding level (quantity exact at all N)."""
        return all(e <= CONVERGED_FLOOR for e in self.errors)

    @property
    def order(self) -> float | None:
        if len(self.Ns) < 3 or any(e <= CONVERGED_FLOOR for e in self.errors):
            return None
        return estimate_order(self)

    def monotone(self) -> bool:
        """Nonincreasing, treating errors at rounding level as equal."""
        return all(b <= a or b <= CONVERGED_FLOOR for a, b in zip(self.errors, self.errors[1:]))

    def strictly_decreasing(self) -> bool:
        return all(b < a or b <= CONVERGED_FLOOR for a, b in zip(self.errors, self.errors[1:]))

    def improvement(self) -> float:
        """error(first N) / error(last N), inf when the last error is at rounding level."""
        if self.errors[-1] <= CONVERGED_FLOOR:
            return math.inf
        return self.errors[0] / self.errors[-1]

    def cumulative_orders(self) -> list[float | None]:
        out: list[float | None] = []
        for k in range(len(self.Ns)):
            es = self.errors[:k + 1]
            if k == 0 or any(e <= CONVERGED_FLOOR for e in es):
                out.append(None)
            else:
                out.append(_slope(self.Ns[:k + 1], es))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "max_error", "est_order"])
        for N, e, o in zip(self.Ns, self.errors, self.cumulative_orders()):
            w.writerow([N, repr(e), "" if o is None else repr(o)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"check": self.check, "label": self.label, "N": self.Ns, "max_error": self.errors,
                "est_order": self.order, "cumulative_order": self.cumulative_orders(),
                "monotone": self.monotone()}

    def to_json(self, extra: Mapping | None = None) -> str:
        out = dict(extra or {})
        out.update(self.to_dict())
        return json.dumps(out, indent=2) + "\n"


# weight ----------------------------------------------------------------------

def scaled_weight(x: int, y: int, N: int, d: DerivedParams) -> float:
    e1, e2 = float(d.eta1), float(d.eta2)
    w = trinomial_weight(x, y, N, d.eta1, d.eta2, mode="float")
    return 2 * math.pi * N * math.sqrt(e1 * e2 * (1 - e1 - e2)) * w


def weight_gaussian_error(N: int, d: DerivedParams, samples=None) -> float:
    """max |2 pi N sqrt(eta1 eta2 eta3) w(x*, y*) - exp(-s*^2 - t*^2)| over the samples."""
    err = 0.0
    for s, t in _samples(samples):
        pt = to_lattice(s, t, N, d)
        err = max(err, abs(scaled_weight(pt.x, pt.y, N, d) - math.exp(-pt.s ** 2 - pt.t ** 2)))
    return err


# Hermite -------------------------------------------------------------------

def _khat(m: int, n: int, N: int, d: DerivedParams):
    idx = PolyIndex(m, n, N)
    alpha = normalization(idx, d).alpha

    def f(x: int, y: int) -> float:
        return alpha * rahman_eval(idx, d, x, y, "float").real

    return f


def _check_degree(m: int, n: int, cap: int = 4):
    if m < 0 or n < 0 or m > cap or n > cap:
        raise ValueError(f"limit studies support degrees 0 <= m, n <= {cap}, got ({m}, {n})")


def hermite_limit_error(m: int, n: int, N: int, d: DerivedParams, samples=None) -> float:
    """max |K_hat_{m,n}^N(x*, y*) - H_m(s*) H_n(t*)| over the samples."""
    _check_degree(m, n)
    khat = _khat(m, n, N, d)
    err = 0.0
    for s, t in _samples(samples):
        pt = to_lattice(s, t, N, d)
        err = max(err, abs(khat(pt.x, pt.y) - hermite(m, pt.s) * hermite(n, pt.t)))
    return err


@dataclass(frozen=True)
class SignCheck:
    agree: int
    total: int

    @property
    def all_agree(self) -> bool:
        return self.agree == self.total


def hermite_sign_agreement(m: int, n: int, N: int, d: DerivedParams, samples=None,
                           threshold: float = 0.1) -> SignCheck:
    """Count samples where sign K_hat = sign H_m H_n, among those with |H_m H_n| > threshold."""
    _check_degree(m, n)
    khat = _khat(m, n, N, d)
    agree = total = 0
    for s, t in _samples(samples):
        pt = to_lattice(s, t, N, d)
        h = hermite(m, pt.s) * hermite(n, pt.t)
        if abs(h) > threshold:
            total += 1
            agree += int(np.sign(khat(pt.x, pt.y)) == np.sign(h))
    return SignCheck(agree, total)


# operator limits -------------------------------------------------------------

_S, _T = sympy.symbols("s t")


@dataclass(frozen=True)
class TestPolynomial:
    """A polynomial in (s, t) of total degree <= 3, with its derivatives."""

    __test__ = False  # keep pytest from collecting this class

    expr: sympy.Expr

    @classmethod
    def parse(cls, source) -> "TestPolynomial":
        if isinstance(source, TestPolynomial):
            return source
        text = str(source).replace("^", "**")
        try:
            expr = sympy.sympify(text, locals={"s": _S, "t": _T})
            poly = sympy.Poly(expr, _S, _T)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise ValueError(f"test function {source!r} is not a polynomial in s, t") from exc
        if not all(c.is_number for c in poly.coeffs()):
            raise ValueError(f"test function {source!r} has symbols other than s, t")
        if poly.total_degree() > 3:
            raise ValueError(f"test function {source!r} has degree {poly.total_degree()} > 3")
        return cls(poly.as_expr())

    def fn(self, *derivs) -> Callable[[float, float], float]:
        e = sympy.diff(self.expr, *derivs) if derivs else self.expr
        return sympy.lambdify((_S, _T), e, "math")

    def __str__(self) -> str:
        return str(self.expr)


def _l2_consts(d: DerivedParams):
    p1, p2, p3, p4 = (float(q) for q in d.p.as_tuple())
    a = p1 * p4 / (p2 + p4)
    b = p2 * p3 / (p1 + p3)
    return float(d.ell2), a, b, math.sqrt(a * b)


def limit_operator(which: str, d: DerivedParams, f: TestPolynomial) -> Callable[[float, float], float]:
    """(D f)(s, t) for the continuum limit D of Lambda1, Lambda2 or L2."""
    fs, ft = f.fn(_S), f.fn(_T)
    fss, ftt, fst = f.fn(_S, _S), f.fn(_T, _T), f.fn(_S, _T)
    if which == "Lambda1":
        return lambda s, t: -0.5 * fss(s, t) + s * fs(s, t)
    if which == "Lambda2":
        return lambda s, t: -0.5 * ftt(s, t) + t * ft(s, t)
    if which == "L2":
        # -1/2 (n.grad)^2 + (n.w)(n.grad) with n = sqrt(l2) (sqrt(a), sqrt(b)), a unit vector
        l2, a, b, r = _l2_consts(d)

        def D(s, t):
            diff = -0.5 * (a * fss(s, t) + b * ftt(s, t)) - r * fst(s, t)
            drift = (a * s + r * t) * fs(s, t) + (r * s + b * t) * ft(s, t)
            return l2 * (diff + drift)

        return D
    raise ValueError(f"which must be one of {LIMIT_OPERATORS}, got {which!r}")


def _limit_stencil(which: str, N: int, d: DerivedParams):
    if which == "Lambda1":
        return lambda_stencil(1, N, d)
    if which == "Lambda2":
        return lambda_stencil(2, N, d)
    if which == "L2":
        return l2_stencil(N, d)
    raise ValueError(f"which must be one of {LIMIT_OPERATORS}, got {which!r}")


def operator_limit_residual(which: str, N: int, d: DerivedParams, testfn, samples=None) -> float:
    """max |(Op^N (f o coords))(x*, y*) - (D f)(s*, t*)| over the samples."""
    f = TestPolynomial.parse(testfn)
    D = limit_operator(which, d, f)
    stencil = _limit_stencil(which, N, d)
    fval = f.fn()
    err = 0.0
    for s, t in _samples(samples):
        pt = to_lattice(s, t, N, d)
        lhs = 0.0
        for (u, v), c in stencil.at(pt.x, pt.y).items():
            lhs += float(c) * fval(*inverse(u, v, N, d))
        err = max(err, abs(lhs - D(pt.s, pt.t)))
    return err


# ladders ---------------------------------------------------------------------

def ladder_scale(side: str, direction: str, N: int, d: DerivedParams) -> float:
    """Factor sigma with sigma A K_hat_{m,n}^N = K_hat_{m+1,n}^{N+1} (raising) or m K_hat_{m-1,n}^{N-1}."""
    p1, p2, p3, p4 = (float(q) for q in d.p.as_tuple())
    S, dd = float(d.sum_p), float(d.delta)
    P = p1 * p3 * (p2 + p4) if side == "R" else p2 * p4 * (p1 + p3)
    if direction == "+":
        return -math.sqrt(2 * S * P) / (dd * math.sqrt(N + 1))
    if direction == "-":
        return -math.sqrt(N) * dd / math.sqrt(2 * S * P)
    raise ValueError(f"direction must be '+' or '-', got {direction!r}")


def _ladder_target(side: str, direction: str, m: int, n: int):
    """(coefficient, m', n') of the Hermite-side image of H_m H_n."""
    if direction == "+":
        return (1, m + 1, n) if side == "R" else (1, m, n + 1)
    if side == "R":
        return (m, m - 1, n)
    return (n, m, n - 1)


def _scaled_ladder_values(side, direction, m, n, N, d, samples):
    """Yield (sample on the codomain lattice, sigma (A K_hat)(x*, y*))."""
    sigma = ladder_scale(side, direction, N, d)
    stencil = ladder_stencil(side, direction, N, d)
    khat = _khat(m, n, N, d)
    N_out = stencil.n_out
    for s, t in _samples(samples):
        pt = to_lattice(s, t, N_out, d)
        val = sum(float(c) * khat(u, v) for (u, v), c in stencil.at(pt.x, pt.y).items())
        yield pt, sigma * val


def scaled_ladder_limit_error(side: str, direction: str, N: int, d: DerivedParams,
                              m: int = 0, n: int = 0, samples=None) -> float:
    """max |sigma A K_hat_{m,n}^N - (Hermite ladder image of H_m H_n)| on the codomain lattice.

    Raising maps H_m H_n to H_{m+1} H_n (2s - d/ds); lowering maps it to
    m H_{m-1} H_n (d/ds / 2), and likewise in t for the L side.
    """
    _check_degree(m, n, cap=3)
    coef, mm, nn = _ladder_target(side, direction, m, n)
    err = 0.0
    for pt, val in _scaled_ladder_values(side, direction, m, n, N, d, samples):
        target = 0.0 if coef == 0 else coef * hermite(mm, pt.s) * hermite(nn, pt.t)
        err = max(err, abs(val - target))
    return err


def scaled_ladder_consistency(side: str, direction: str, N: int, d: DerivedParams,
                              m: int = 0, n: int = 0, samples=None) -> float:
    """max |sigma A K_hat_{m,n}^N - c K_hat_{m',n'}^{N+-1}|: zero up to rounding at every N."""
    _check_degree(m, n, cap=3)
    coef, mm, nn = _ladder_target(side, direction, m, n)
    N_out = N + 1 if direction == "+" else N - 1
    target = _khat(mm, nn, N_out, d) if coef else None
    err = 0.0
    for pt, val in _scaled_ladder_values(side, direction, m, n, N, d, samples):
        ref = coef * target(pt.x, pt.y) if coef else 0.0
        err = max(err, abs(val - ref) / max(1.0, abs(ref)))
    return err


# ladder runs -------------------------------------------------------------------

def convergence(check: str, Ns: Iterable[int], d: DerivedParams, *, m: int = 0, n: int = 0,
                which: str = "Lambda1", testfn="s^2", side: str = "R", direction: str = "+",
                samples=None) -> ConvergenceRecord:
    """Run one limit check along an increasing N ladder."""
    samples = _samples(samples)
    if check == "weight":
        label, fn = "weight", lambda N: weight_gaussian_error(N, d, samples)
    elif check == "hermite":
        label, fn = f"hermite m={m} n={n}", lambda N: hermite_limit_error(m, n, N, d, samples)
    elif check == "operator":
        f = TestPolynomial.parse(testfn)
        label, fn = f"operator {which} f={f}", lambda N: operator_limit_residual(which, N, d, f, samples)
    elif check == "ladder":
        label = f"ladder {side}{direction} m={m} n={n}"
        fn = lambda N: scaled_ladder_limit_error(side, direction, N, d, m, n, samples)  # noqa: E731
    else:
        raise ValueError(f"check must be one of {CHECKS}, got {check!r}")
    rec = ConvergenceRecord(check, label)
    for N in sorted(set(int(N) for N in Ns)):
        rec.add(N, fn(N))
    return rec


__all__ = [
    "CHECKS", "CONVERGED_FLOOR", "DEFAULT_N_LADDER", "LIMIT_OPERATORS", "ConvergenceRecord",
    "LatticeSample", "ScaledCoords", "SignCheck", "TestPolynomial", "admissible_radius",
    "convergence", "default_samples", "estimate_order", "forward", "hermite_limit_error",
    "hermite_sign_agreement", "inverse", "ladder_scale", "limit_operator",
    "operator_limit_residual", "scaled_ladder_consistency", "scaled_ladder_limit_error",
    "scaled_weight", "to_lattice", "weight_gaussian_error",
]
