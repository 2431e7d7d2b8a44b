"""Named identity suites over the exact (or float) operators and polynomials.

Every identity has a stable id such as ``ha.1R`` or ``ladder.RminusAction``.
Exact mode passes a case only when its residual is literally zero.  Float
mode reports the residual relative to the size of the operands (matrix
max-abs, times the grid max-abs for operator-on-function identities) and
compares it with a tolerance.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from sympy.polys.domains import QQ, QQ_I

from .errors import DegenerateParametersError
from .lattice import (EXACT, FLOAT, MODES, GridFunction, LatticeOperator, commutator, compose,
                      enumerate_lattice, exact_abs)
from .operators import (build_five_term, build_frak_k, build_hamiltonian, build_ladder, build_lambda,
                        build_rec, build_su2, build_tratnik_pair, coupling_offsets, rec_eigenvalue)
from .parameters import (DerivedParams, FrequencyPair, RahmanParams, check_functional_relations,
                         derive_params, format_rational)
from .polynomials import (PolyIndex, norm_I, rahman_eval_grid_recurrence, rahman_grid, tratnik_grid,
                          weight_grid)

EXACT_MAX_N = 12
FLOAT_MAX_DEGREE = 6
DEFAULT_TOLERANCE = 1e-9
DEFAULT_ANISO = FrequencyPair(2, 5)

SUITES = (
    "functional", "heisenberg", "factorization", "su2", "casimir", "eigen-rahman",
    "eigen-tratnik", "ladder-actions", "orthogonality", "rotation", "fiveterm",
    "rec-consistency", "all",
)


# residuals ----------------------------------------------------------------

def residual(a, b):
    """Max-abs entrywise difference of two operators (or two grid functions).

    Exact operands give an exact rational; float operands a double.
    """
    if isinstance(a, LatticeOperator) and isinstance(b, LatticeOperator):
        if a.shape != b.shape or a.domain != b.domain or a.codomain != b.codomain:
            raise ValueError(f"residual needs identical shapes, got {a.shape} and {b.shape}")
        return (a - b).max_abs()
    if isinstance(a, GridFunction) and isinstance(b, GridFunction):
        if a.lattice != b.lattice:
            raise ValueError(f"residual needs one lattice, got {a.lattice!r} and {b.lattice!r}")
        return (a - b).max_abs()
    raise TypeError("residual compares two LatticeOperators or two GridFunctions")


@dataclass(frozen=True)
class Term:
    """One comparison: absolute residual and the magnitude it is measured against."""

    abs: object
    scale: object = 1


def _op_term(a: LatticeOperator, b: LatticeOperator) -> Term:
    return Term(residual(a, b), max(a.max_abs(), b.max_abs()))


def _grid_term(a: GridFunction, b: GridFunction) -> Term:
    return Term(residual(a, b), max(a.max_abs(), b.max_abs()))


def _eig_term(op: LatticeOperator, v: GridFunction, lam) -> Term:
    return Term(residual(op @ v, v.scale(lam)), op.max_abs() * v.max_abs())


def _zero_term(a, scale=None) -> Term:
    return Term(a.max_abs(), a.max_abs() if scale is None else scale)


# report types ---------------------------------------------------------------

@dataclass(frozen=True)
class CaseResult:
    id: str
    params: str
    N: int
    residual: object
    passed: bool
    skipped: bool = False
    note: str = ""

    def to_dict(self, mode: str) -> dict:
        if self.residual is None:
            res = None
        elif mode == EXACT:
            res = format_rational(self.residual)
        else:
            res = float(self.residual)
        out = {"id": self.id, "params": self.params, "N": self.N, "residual": res, "pass": self.passed}
        if self.skipped:
            out["skipped"] = True
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    suite: str
    mode: str
    params: str
    N: int
    tolerance: float | None
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self, extra: dict | None = None) -> dict:
        out = {"suite": self.suite, "mode": self.mode, "params": self.params, "N": self.N}
        if self.mode == FLOAT:
            out["tolerance"] = self.tolerance
        if extra:
            out.update(extra)
        out["pass"] = self.passed
        out["cases"] = [c.to_dict(self.mode) for c in self.cases]
        return out

    def to_json(self, extra: dict | None = None) -> str:
        return json.dumps(self.to_dict(extra), indent=2, sort_keys=False) + "\n"

    def summary(self) -> str:
        done = [c for c in self.cases if not c.skipped]
        return (f"suite={self.suite} mode={self.mode} N={self.N} params={self.params}: "
                f"{sum(c.passed for c in done)}/{len(done)} passed"
                f" ({len(self.cases) - len(done)} skipped)")


# context: everything a suite may need, built lazily -------------------------

class Context:
    def __init__(self, d: DerivedParams, N: int, mode: str, freqs: FrequencyPair,
                 max_degree: int | None):
        self.d, self.N, self.mode, self.freqs = d, N, mode, freqs
        self.max_degree = N if max_degree is None else min(max_degree, N)
        self._grids: dict = {}
        self._ladders: dict = {}

    def indices(self, N: int | None = None) -> list[PolyIndex]:
        N = self.N if N is None else N
        top = min(self.max_degree, N)
        return [PolyIndex(m, k - m, N) for k in range(top + 1) for m in range(k + 1)]

    def K(self, m: int, n: int, N: int | None = None) -> GridFunction:
        N = self.N if N is None else N
        key = ("R", m, n, N)
        if key not in self._grids:
            self._grids[key] = rahman_grid(PolyIndex(m, n, N), self.d, self.mode)
        return self._grids[key]

    def T(self, n1: int, n2: int) -> GridFunction:
        key = ("T", n1, n2, self.N)
        if key not in self._grids:
            self._grids[key] = tratnik_grid(n1, n2, self.d, self.N, self.mode)
        return self._grids[key]

    def ladder(self, side: str, direction: str, N: int) -> LatticeOperator:
        key = (side, direction, N)
        if key not in self._ladders:
            self._ladders[key] = build_ladder(side, direction, N, self.d, self.mode)
        return self._ladders[key]

    def identity(self, N: int | None = None) -> LatticeOperator:
        return LatticeOperator.identity(enumerate_lattice(self.N if N is None else N), self.mode)

    def i_times(self, op: LatticeOperator) -> LatticeOperator:
        return op.scale(QQ_I(0, 1) if self.mode == EXACT else 1j)

    @cached_property
    def lam1(self):
        return build_lambda(1, self.N, self.d, self.mode)

    @cached_property
    def lam2(self):
        return build_lambda(2, self.N, self.d, self.mode)

    @cached_property
    def hiso(self):
        return build_hamiltonian(True, self.N, self.d, mode=self.mode)

    @cached_property
    def haniso(self):
        return build_hamiltonian(False, self.N, self.d, self.freqs, mode=self.mode)

    @cached_property
    def su2(self):
        return build_su2(self.N, self.d, self.mode)

    @cached_property
    def tratnik(self):
        return build_tratnik_pair(self.N, self.d, self.mode)

    @cached_property
    def frakk(self):
        return build_frak_k(self.N, self.d, self.mode)

    @cached_property
    def five(self):
        return build_five_term(self.N, self.d, self.mode)

    @cached_property
    def weight(self):
        return weight_grid(self.N, self.d, self.mode)


# registry -----------------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    id: str
    suite: str
    fn: Callable[[Context], Iterable[Term]]
    min_N: int = 0
    exact_only: bool = False


REGISTRY: dict[str, Identity] = {}


def identity(id_: str, suite: str, min_N: int = 0, exact_only: bool = False):
    def deco(fn):
        if id_ in REGISTRY:
            raise ValueError(f"duplicate identity id {id_!r}")
        REGISTRY[id_] = Identity(id_, suite, fn, min_N, exact_only)
        return fn
    return deco


def registered_ids(suite: str = "all") -> list[str]:
    return sorted(i for i, ident in REGISTRY.items() if suite == "all" or ident.suite == suite)


# functional relations
for _k in (1, 2, 3):
    def _fr(ctx, k=_k):
        r = check_functional_relations(ctx.d)[k - 1].residual
        yield Term(abs(r), 1)
    identity(f"fr.{_k}", "functional")(_fr)


# shifted Heisenberg algebra
for _side in ("R", "L"):
    def _ha1(ctx, side=_side):
        N = ctx.N
        lhs = compose(ctx.ladder(side, "-", N + 1), ctx.ladder(side, "+", N)) \
            - compose(ctx.ladder(side, "+", N - 1), ctx.ladder(side, "-", N))
        yield _op_term(lhs, ctx.identity())
    identity(f"ha.1{_side}", "heisenberg", min_N=1)(_ha1)


@identity("ha.2", "heisenberg", min_N=2)
def _ha2(ctx):
    N = ctx.N
    yield _op_term(compose(ctx.ladder("R", "-", N - 1), ctx.ladder("L", "-", N)),
                   compose(ctx.ladder("L", "-", N - 1), ctx.ladder("R", "-", N)))


@identity("ha.3", "heisenberg")
def _ha3(ctx):
    N = ctx.N
    yield _op_term(compose(ctx.ladder("R", "+", N + 1), ctx.ladder("L", "+", N)),
                   compose(ctx.ladder("L", "+", N + 1), ctx.ladder("R", "+", N)))


@identity("ha.4", "heisenberg", min_N=1)
def _ha4(ctx):
    N = ctx.N
    yield _op_term(compose(ctx.ladder("R", "-", N + 1), ctx.ladder("L", "+", N)),
                   compose(ctx.ladder("L", "+", N - 1), ctx.ladder("R", "-", N)))


@identity("ha.5", "heisenberg", min_N=1)
def _ha5(ctx):
    # well-typed mirror of ha.4: A_+^{(R,N-1)} A_-^{(L)} = A_-^{(L)} A_+^{(R,N)}
    N = ctx.N
    yield _op_term(compose(ctx.ladder("R", "+", N - 1), ctx.ladder("L", "-", N)),
                   compose(ctx.ladder("L", "-", N + 1), ctx.ladder("R", "+", N)))


# factorizations
for _which, _side in ((1, "R"), (2, "L")):
    def _fa(ctx, which=_which, side=_side):
        lam = ctx.lam1 if which == 1 else ctx.lam2
        yield _op_term(lam, compose(ctx.ladder(side, "+", ctx.N - 1), ctx.ladder(side, "-", ctx.N)))
    identity(f"fa.{_which}", "factorization", min_N=1)(_fa)


# SU(2)
for _name, (_a, _b, _c) in {"xy": ("JX", "JY", "JZ"), "yz": ("JY", "JZ", "JX"),
                            "zx": ("JZ", "JX", "JY")}.items():
    def _su2(ctx, a=_a, b=_b, c=_c):
        ops = ctx.su2
        yield _op_term(commutator(getattr(ops, a), getattr(ops, b)), ctx.i_times(getattr(ops, c)))
    identity(f"su2.{_name}", "su2", min_N=1)(_su2)

for _j in ("JX", "JY", "JZ"):
    def _inv(ctx, j=_j):
        op = getattr(ctx.su2, j)
        yield _zero_term(commutator(ctx.hiso, op), ctx.hiso.max_abs() * op.max_abs())
    identity(f"su2.hiso.{_j}", "su2", min_N=1)(_inv)


# Casimir
for _j in ("JX", "JY", "JZ"):
    def _qc(ctx, j=_j):
        op, q = getattr(ctx.su2, j), ctx.su2.Casimir
        yield _zero_term(commutator(q, op), q.max_abs() * op.max_abs())
    identity(f"casimir.commute.{_j}", "casimir", min_N=1)(_qc)


@identity("casimir.spectrum", "casimir", min_N=1)
def _qspec(ctx):
    q = ctx.su2.Casimir
    for idx in ctx.indices():
        j2 = idx.m + idx.n
        yield _eig_term(q, ctx.K(idx.m, idx.n), QQ(j2, 2) * QQ(j2 + 2, 2))


# eigenvalue equations, Rahman family
def _rahman_eig(id_, op_attr, eig, min_N=0):
    def fn(ctx):
        op = getattr(ctx, op_attr) if isinstance(op_attr, str) else op_attr(ctx)
        for idx in ctx.indices():
            yield _eig_term(op, ctx.K(idx.m, idx.n), eig(ctx, idx.m, idx.n))
    identity(id_, "eigen-rahman", min_N=min_N)(fn)


_rahman_eig("eig.Lambda1", "lam1", lambda ctx, m, n: m)
_rahman_eig("eig.Lambda2", "lam2", lambda ctx, m, n: n)
_rahman_eig("eig.hiso", "hiso", lambda ctx, m, n: m + n)
_rahman_eig("eig.haniso", "haniso", lambda ctx, m, n: ctx.freqs.omega1_sq * m + ctx.freqs.omega2_sq * n)
_rahman_eig("eig.JZ", lambda ctx: ctx.su2.JZ, lambda ctx, m, n: QQ(m - n, 2), min_N=1)


# eigenvalue equations, Tratnik family
def _tratnik_eig(id_, op_attr, eig):
    def fn(ctx):
        op = op_attr(ctx)
        for idx in ctx.indices():
            yield _eig_term(op, ctx.T(idx.m, idx.n), eig(idx.m, idx.n))
    identity(id_, "eigen-tratnik", min_N=1)(fn)


_tratnik_eig("eig.tratnik.L1", lambda ctx: ctx.tratnik[0], lambda n1, n2: n1 + n2)
_tratnik_eig("eig.tratnik.L2", lambda ctx: ctx.tratnik[1], lambda n1, n2: n2)
_tratnik_eig("eig.tratnik.hiso", lambda ctx: ctx.hiso, lambda n1, n2: n1 + n2)
_tratnik_eig("eig.tratnik.frakk", lambda ctx: ctx.frakk, lambda n1, n2: QQ(n1 - n2, 2))


# ladder actions
@identity("ladder.RminusAction", "ladder-actions", min_N=1)
def _lrm(ctx):
    N = ctx.N
    op = ctx.ladder("R", "-", N)
    for idx in ctx.indices():
        m, n = idx.m, idx.n
        out = op @ ctx.K(m, n)
        if m == 0:
            yield _zero_term(out, op.max_abs() * ctx.K(m, n).max_abs())
        else:
            yield _grid_term(out, ctx.K(m - 1, n, N - 1).scale(QQ(m, N)))


@identity("ladder.LminusAction", "ladder-actions", min_N=1)
def _llm(ctx):
    N = ctx.N
    op = ctx.ladder("L", "-", N)
    for idx in ctx.indices():
        m, n = idx.m, idx.n
        out = op @ ctx.K(m, n)
        if n == 0:
            yield _zero_term(out, op.max_abs() * ctx.K(m, n).max_abs())
        else:
            yield _grid_term(out, ctx.K(m, n - 1, N - 1).scale(QQ(n, N)))


for _side in ("R", "L"):
    def _lp(ctx, side=_side):
        N = ctx.N
        op = ctx.ladder(side, "+", N)
        for idx in ctx.indices():
            m, n = idx.m, idx.n
            up = ctx.K(m + 1, n, N + 1) if side == "R" else ctx.K(m, n + 1, N + 1)
            yield _grid_term(op @ ctx.K(m, n), up.scale(N + 1))
    identity(f"ladder.{_side}plusAction", "ladder-actions")(_lp)


# orthogonality
def _inner(w: GridFunction, a: GridFunction, b: GridFunction):
    if w.mode == FLOAT:
        return complex(np.sum(w.values * a.values * b.values))
    return sum((wi * ai * bi for wi, ai, bi in zip(w.values, a.values, b.values)), QQ(0))


def _inner_scale(a: GridFunction, b: GridFunction):
    # weights sum to one, so max|a| max|b| bounds every partial sum
    return a.max_abs() * b.max_abs()


def _scalar_term(value, target, scale) -> Term:
    if isinstance(value, (complex, float)):
        return Term(abs(complex(value) - complex(target)), scale)
    return Term(exact_abs(value - target), scale)


@identity("orth.rahman", "orthogonality")
def _orth_r(ctx):
    w = ctx.weight
    idxs = ctx.indices()
    for i, a in enumerate(idxs):
        ka = ctx.K(a.m, a.n)
        for b in idxs[i:]:
            kb = ctx.K(b.m, b.n)
            target = norm_I(a, ctx.d) if a == b else QQ(0)
            if ctx.mode == FLOAT:
                target = float(target)
            yield _scalar_term(_inner(w, ka, kb), target, _inner_scale(ka, kb))


@identity("orth.tratnik", "orthogonality")
def _orth_t(ctx):
    w = ctx.weight
    idxs = ctx.indices()
    for i, a in enumerate(idxs):
        ta = ctx.T(a.m, a.n)
        for b in idxs[i + 1:]:
            tb = ctx.T(b.m, b.n)
            target = 0.0 if ctx.mode == FLOAT else QQ(0)
            yield _scalar_term(_inner(w, ta, tb), target, _inner_scale(ta, tb))


@identity("orth.weight", "orthogonality")
def _orth_w(ctx):
    total = sum(ctx.weight.values) if ctx.mode == FLOAT else sum(ctx.weight.values, QQ(0))
    yield _scalar_term(total, 1.0 if ctx.mode == FLOAT else QQ(1), 1)


# rotation
@identity("rot.identity", "rotation", min_N=1)
def _rot(ctx):
    jx, jy, jz, _ = ctx.su2
    d = ctx.d
    a, b, c = (d.a, d.b, d.c) if ctx.mode == EXACT else (float(d.a), complex(0, float(d.b.y)), float(d.c))
    rhs = jx.scale(a) + jy.scale(b) + jz.scale(c)
    yield _op_term(ctx.frakk, rhs)


@identity("rot.unit", "rotation")
def _rot_unit(ctx):
    d = ctx.d
    a, c = QQ_I.convert(d.a), QQ_I.convert(d.c)
    s = a * a + d.b * d.b + c * c - QQ_I(1, 0)
    yield Term(max(abs(s.x), abs(s.y)), 1)


# five-term
@identity("fiveterm.combination", "fiveterm")
def _ft_comb(ctx):
    p1, p2, p3, p4 = ctx.d.p.as_tuple()
    yield _op_term(ctx.five, ctx.lam1.scale(p1 + p3) - ctx.lam2.scale(p2 + p4))


@identity("fiveterm.eigen", "fiveterm")
def _ft_eig(ctx):
    p1, p2, p3, p4 = ctx.d.p.as_tuple()
    for idx in ctx.indices():
        yield _eig_term(ctx.five, ctx.K(idx.m, idx.n), (p1 + p3) * idx.m - (p2 + p4) * idx.n)


@identity("fiveterm.nearest", "fiveterm")
def _ft_nn(ctx):
    extra = coupling_offsets(ctx.five) - {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    yield Term(QQ(len(extra)) if ctx.mode == EXACT else float(len(extra)), 1)


# recurrences
for _which in (1, 2):
    def _rec_op(ctx, which=_which):
        p1, p2, p3, p4 = ctx.d.p.as_tuple()
        a, b = (p2 * (p1 + p3), p1 * (p2 + p4)) if which == 1 else (p4 * (p1 + p3), p3 * (p2 + p4))
        rec = build_rec(which, ctx.N, ctx.d, ctx.mode)
        yield _op_term(rec, -(ctx.lam1.scale(a) + ctx.lam2.scale(b)))
    identity(f"rec.op{_which}", "rec-consistency")(_rec_op)

    def _rec_eig(ctx, which=_which):
        rec = build_rec(which, ctx.N, ctx.d, ctx.mode)
        for idx in ctx.indices():
            yield _eig_term(rec, ctx.K(idx.m, idx.n), rec_eigenvalue(which, idx.m, idx.n, ctx.d))
    identity(f"rec.eigen{_which}", "rec-consistency")(_rec_eig)


@identity("rec.propagation", "rec-consistency")
def _rec_prop(ctx):
    for idx in ctx.indices():
        swept = rahman_eval_grid_recurrence(idx, ctx.d)
        if ctx.mode == FLOAT:
            swept = swept.to_float()
        yield _grid_term(swept, ctx.K(idx.m, idx.n))


# running ------------------------------------------------------------------

def _as_derived(p) -> DerivedParams:
    if isinstance(p, DerivedParams):
        return p
    if isinstance(p, str):
        return derive_params(RahmanParams.parse(p))
    if isinstance(p, RahmanParams):
        return derive_params(p)
    return derive_params(RahmanParams.from_sequence(list(p)))


def _evaluate(ident: Identity, ctx: Context, tolerance: float) -> CaseResult:
    label = ctx.d.p.label()
    if ctx.N < ident.min_N:
        return CaseResult(ident.id, label, ctx.N, None, True, True, f"needs N >= {ident.min_N}")
    terms = list(ident.fn(ctx))
    if ctx.mode == EXACT:
        res = max((QQ(t.abs) for t in terms), default=QQ(0))
        return CaseResult(ident.id, label, ctx.N, res, res == 0)
    rel = max((float(t.abs) / float(t.scale) if float(t.scale) > 0 else float(t.abs) for t in terms),
              default=0.0)
    return CaseResult(ident.id, label, ctx.N, float(rel), rel <= tolerance)


def run_suite(name: str, N: int, p, mode: str = EXACT, tolerance: float = DEFAULT_TOLERANCE,
              freqs: FrequencyPair | None = None, max_degree: int | None = None) -> VerificationReport:
    """Evaluate every identity of suite ``name`` on T_N.

    Exact mode requires N <= 12 and covers all degrees m + n <= N.  Float
    mode caps degrees at ``FLOAT_MAX_DEGREE`` unless ``max_degree`` says
    otherwise, since the float direct sum loses accuracy at high degree.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if N < 0:
        raise ValueError("N must be >= 0")
    if mode == EXACT and N > EXACT_MAX_N:
        raise ValueError(f"exact mode supports N <= {EXACT_MAX_N}; use mode='float' for N={N}")
    d = _as_derived(p)
    if mode == FLOAT and max_degree is None:
        max_degree = FLOAT_MAX_DEGREE
    ctx = Context(d, N, mode, freqs or DEFAULT_ANISO, max_degree)
    report = VerificationReport(name, mode, d.p.label(), N, tolerance if mode == FLOAT else None)
    for id_ in registered_ids(name):
        report.cases.append(_evaluate(REGISTRY[id_], ctx, tolerance))
    return report


def random_params(count: int, seed: int, low: int = 1, high: int = 9,
                  max_den: int = 4) -> list[RahmanParams]:
    """Seeded random rational tuples with every p_i in [low, high] and p1 p4 != p2 p3."""
    rng = random.Random(seed)
    out: list[RahmanParams] = []
    while len(out) < count:
        vals = []
        for _ in range(4):
            den = rng.randint(1, max_den)
            num = rng.randint(low * den, high * den)
            vals.append(Fraction(num, den))
        try:
            out.append(RahmanParams(*vals))
        except DegenerateParametersError:
            continue
    return out


__all__ = [
    "DEFAULT_TOLERANCE", "EXACT_MAX_N", "FLOAT_MAX_DEGREE", "REGISTRY", "SUITES", "CaseResult",
    "Context", "Identity", "Term", "VerificationReport", "random_params", "registered_ids",
    "residual", "run_suite",
]
