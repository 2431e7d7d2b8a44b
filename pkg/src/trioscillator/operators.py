"""Difference operators on the triangular lattice.

Every operator that the model writes down as an explicit difference
expression (Lambda_1, Lambda_2, the four ladders, the five-term and the two
recurrence operators, plain shifts) is assembled row by row from a
:class:`Stencil`.  Operators defined as products of ladders (J_X, J_Y, J_Z,
the Casimir, L_2) are formed by composing the assembled ladder matrices, so
the factorization identities compare two independent constructions.

Coefficients are exact ``QQ`` numbers.  ``mode="float"`` assembles the same
stencil and converts the matrix to complex doubles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Mapping

from sympy.polys.domains import QQ, QQ_I

from .lattice import EXACT, LatticeOperator, Point, compose, enumerate_lattice, linear_combination
from .parameters import DerivedParams, FrequencyPair, RahmanParams, derive_params

Row = Mapping[Point, Any]

KINDS = (
    "Lambda1", "Lambda2", "FiveTerm", "Rec1", "Rec2",
    "A_minus_R", "A_minus_L", "A_plus_R", "A_plus_L",
    "H_iso", "H_aniso", "JX", "JY", "JZ", "Casimir", "L1", "L2", "FrakK",
)
_LADDER_KINDS = {"A_minus_R": ("R", "-"), "A_minus_L": ("L", "-"),
                 "A_plus_R": ("R", "+"), "A_plus_L": ("L", "+")}


# stencils ---------------------------------------------------------------

@dataclass(frozen=True)
class Stencil:
    """Pointwise description of an operator from T_{n_in} to T_{n_out}.

    ``row(x, y)`` returns ``{(x', y'): coefficient}`` for a point of the
    codomain.  Stencils can be added, scaled and composed without building a
    matrix, which is what the large-N continuum checks rely on.
    """

    row: Callable[[int, int], Row]
    n_in: int
    n_out: int
    name: str = ""

    def at(self, x: int, y: int) -> dict:
        return {pt: c for pt, c in self.row(x, y).items() if c != 0}

    def _check(self, other: "Stencil"):
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            raise ValueError(
                f"stencils T_{self.n_in}->T_{self.n_out} and T_{other.n_in}->T_{other.n_out} "
                "cannot be combined")

    def scale(self, c) -> "Stencil":
        row = self.row
        return Stencil(lambda x, y: {pt: c * v for pt, v in row(x, y).items()},
                       self.n_in, self.n_out, self.name)

    def __add__(self, other: "Stencil") -> "Stencil":
        self._check(other)
        return combine([(1, self), (1, other)])

    def __sub__(self, other: "Stencil") -> "Stencil":
        self._check(other)
        return combine([(1, self), (-1, other)])

    def then(self, outer: "Stencil") -> "Stencil":
        """``outer`` applied after ``self``."""
        return compose_stencils(outer, self)

    def assemble(self, mode: str = EXACT) -> LatticeOperator:
        op = LatticeOperator.from_stencil(enumerate_lattice(self.n_in), enumerate_lattice(self.n_out),
                                          self.row, self.name)
        return op.to_mode(mode)


def combine(terms) -> Stencil:
    """Linear combination of stencils sharing domain and codomain."""
    terms = list(terms)
    first = terms[0][1]
    for _, s in terms[1:]:
        first._check(s)

    def row(x, y):
        acc: dict = {}
        for c, s in terms:
            for pt, v in s.row(x, y).items():
                acc[pt] = acc.get(pt, 0) + c * v
        return acc

    return Stencil(row, first.n_in, first.n_out)


def compose_stencils(outer: Stencil, inner: Stencil) -> Stencil:
    """outer o inner, evaluated point by point."""
    if outer.n_in != inner.n_out:
        raise ValueError(f"cannot compose T_{outer.n_in}->T_{outer.n_out} after "
                         f"T_{inner.n_in}->T_{inner.n_out}")

    def row(x, y):
        acc: dict = {}
        for mid, c in outer.row(x, y).items():
            if c == 0:
                continue
            for pt, v in inner.row(*mid).items():
                acc[pt] = acc.get(pt, 0) + c * v
        return acc

    return Stencil(row, inner.n_in, outer.n_out)


def _delta(acc: dict, c, x: int, y: int, dx: int, dy: int):
    """Add c * Delta_{dx,dy} at (x, y): c f(x+dx, y+dy) - c f(x, y)."""
    if c == 0:
        return
    tgt = (x + dx, y + dy)
    acc[tgt] = acc.get(tgt, 0) + c
    acc[(x, y)] = acc.get((x, y), 0) - c


def _as_derived(d) -> DerivedParams:
    if isinstance(d, DerivedParams):
        return d
    if isinstance(d, RahmanParams):
        return derive_params(d)
    return derive_params(tuple(d))


def _consts(d: DerivedParams):
    return (*d.p.as_tuple(), d.sum_p, d.delta)


# shifts ------------------------------------------------------------------

_AXES = {"x": (1, 0), "y": (0, 1)}


def parse_direction(direction) -> tuple[int, int]:
    """``"-x,y"`` or ``(-1, 1)`` -> (-1, 1)."""
    if isinstance(direction, str):
        dx = dy = 0
        for part in direction.replace(" ", "").split(","):
            sign = -1 if part.startswith("-") else 1
            axis = part.lstrip("+-")
            if axis not in _AXES:
                raise ValueError(f"unknown axis {part!r} in direction {direction!r}")
            ax, ay = _AXES[axis]
            dx, dy = dx + sign * ax, dy + sign * ay
        return dx, dy
    dx, dy = direction
    return int(dx), int(dy)


def shift_stencil(kind: str, direction, N: int) -> Stencil:
    if N < 0:
        raise ValueError("N must be >= 0")
    dx, dy = parse_direction(direction)
    if kind == "delta":
        def row(x, y):
            acc: dict = {}
            _delta(acc, QQ(1), x, y, dx, dy)
            return acc
    elif kind == "T":
        def row(x, y):
            return {(x + dx, y + dy): QQ(1)}
    else:
        raise ValueError(f"shift kind must be 'delta' or 'T', got {kind!r}")

    def clipped(x, y):
        # out-of-lattice targets contribute zero
        return {pt: c for pt, c in row(x, y).items()
                if pt[0] >= 0 and pt[1] >= 0 and pt[0] + pt[1] <= N}

    return Stencil(clipped, N, N, f"{kind}[{dx},{dy}]")


def build_shift(kind: str, direction, N: int, mode: str = EXACT) -> LatticeOperator:
    """Delta_{dir} f = f(. + dir) - f or T_{dir} f = f(. + dir) on T_N.

    Targets outside T_N read as zero, so near the boundary Delta acts as -f.
    """
    return shift_stencil(kind, direction, N).assemble(mode)


# Lambda, five-term, recurrences -------------------------------------------

def lambda_stencil(which: int, N: int, d) -> Stencil:
    d = _as_derived(d)
    p1, p2, p3, p4, S, dd = _consts(d)
    B = dd / ((p1 + p2) * (p3 + p4))
    if which == 1:
        A = p1 * p3 * S / ((p1 + p3) * dd)
        ax, ay = A * p2 / (p1 + p2), -A * p4 / (p3 + p4)
        bx, by = B * p3 / (p1 + p3), -B * p1 / (p1 + p3)
        cxy, cyx = -p3 * p4 / ((p1 + p3) * (p3 + p4)), -p1 * p2 / ((p1 + p2) * (p1 + p3))
    elif which == 2:
        A = p2 * p4 * S / ((p2 + p4) * dd)
        ax, ay = -A * p1 / (p1 + p2), A * p3 / (p3 + p4)
        bx, by = -B * p4 / (p2 + p4), B * p2 / (p2 + p4)
        cxy, cyx = -p3 * p4 / ((p2 + p4) * (p3 + p4)), -p1 * p2 / ((p1 + p2) * (p2 + p4))
    else:
        raise ValueError(f"which must be 1 or 2, got {which!r}")

    def row(x, y):
        acc: dict = {}
        r = N - x - y
        _delta(acc, r * ax, x, y, 1, 0)
        _delta(acc, r * ay, x, y, 0, 1)
        _delta(acc, x * bx, x, y, -1, 0)
        _delta(acc, y * by, x, y, 0, -1)
        _delta(acc, x * cxy, x, y, -1, 1)
        _delta(acc, y * cyx, x, y, 1, -1)
        return acc

    return Stencil(row, N, N, f"Lambda{which}")


def build_lambda(which: int, N: int, d, mode: str = EXACT) -> LatticeOperator:
    """Lambda_1 or Lambda_2 on T_N; Rahman polynomials have eigenvalue m or n."""
    return lambda_stencil(which, N, d).assemble(mode)


def five_term_stencil(N: int, d) -> Stencil:
    d = _as_derived(d)
    p1, p2, p3, p4, S, dd = _consts(d)
    # the (N-x-y) bracket carries 1/dd so that the operator equals
    # (p1+p3) Lambda1 - (p2+p4) Lambda2 for every parameter set
    ax = p1 * p2 * (p3 + p4) * S / ((p1 + p2) * dd)
    ay = -p3 * p4 * (p1 + p2) * S / ((p3 + p4) * dd)
    bx, by = dd / (p1 + p2), -dd / (p3 + p4)

    def row(x, y):
        acc: dict = {}
        r = N - x - y
        _delta(acc, r * ax, x, y, 1, 0)
        _delta(acc, r * ay, x, y, 0, 1)
        _delta(acc, x * bx, x, y, -1, 0)
        _delta(acc, y * by, x, y, 0, -1)
        return acc

    return Stencil(row, N, N, "FiveTerm")


def build_five_term(N: int, d, mode: str = EXACT) -> LatticeOperator:
    """Nearest-neighbour operator with eigenvalue (p1+p3)m - (p2+p4)n."""
    return five_term_stencil(N, d).assemble(mode)


def rec_stencil(which: int, N: int, d) -> Stencil:
    """The bracketed operator of the x (which=1) or y (which=2) recurrence.

    It equals -[p2(p1+p3) Lambda1 + p1(p2+p4) Lambda2] for which=1 and
    -[p4(p1+p3) Lambda1 + p3(p2+p4) Lambda2] for which=2.
    """
    d = _as_derived(d)
    p1, p2, p3, p4, S, dd = _consts(d)
    B = dd * dd / ((p1 + p2) * (p3 + p4))
    if which == 1:
        def row(x, y):
            acc: dict = {}
            _delta(acc, (N - x - y) * p1 * p2 * S / (p1 + p2), x, y, 1, 0)
            _delta(acc, x * B, x, y, -1, 0)
            _delta(acc, x * p3 * p4 * (p1 + p2) / (p3 + p4), x, y, -1, 1)
            _delta(acc, y * p1 * p2, x, y, 1, -1)
            return acc
    elif which == 2:
        def row(x, y):
            acc: dict = {}
            _delta(acc, (N - x - y) * p3 * p4 * S / (p3 + p4), x, y, 0, 1)
            _delta(acc, y * B, x, y, 0, -1)
            _delta(acc, x * p3 * p4, x, y, -1, 1)
            _delta(acc, y * p1 * p2 * (p3 + p4) / (p1 + p2), x, y, 1, -1)
            return acc
    else:
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    return Stencil(row, N, N, f"Rec{which}")


def build_rec(which: int, N: int, d, mode: str = EXACT) -> LatticeOperator:
    """Recurrence operator; Rahman polynomials have eigenvalue :func:`rec_eigenvalue`."""
    return rec_stencil(which, N, d).assemble(mode)


def rec_eigenvalue(which: int, m: int, n: int, d):
    """Eigenvalue lambda_1 or lambda_2 of the recurrence operator at degree (m, n)."""
    p1, p2, p3, p4 = _as_derived(d).p.as_tuple()
    if which == 1:
        return -(p2 * (p1 + p3) * m + p1 * (p2 + p4) * n)
    return -(p4 * (p1 + p3) * m + p3 * (p2 + p4) * n)


# ladders -----------------------------------------------------------------

def ladder_stencil(side: str, direction: str, N: int, d) -> Stencil:
    """A_-^{(side)}: T_N -> T_{N-1}, or A_+^{(side,N)}: T_N -> T_{N+1}."""
    d = _as_derived(d)
    p1, p2, p3, p4, S, dd = _consts(d)
    if side not in ("R", "L"):
        raise ValueError(f"side must be 'R' or 'L', got {side!r}")
    if direction == "-":
        if N < 1:
            raise ValueError("the lowering operator needs N >= 1 (it maps T_N to T_{N-1})")
        if side == "R":
            C = p1 * p2 * p3 * p4 * S / ((p1 + p3) * dd)
            cx, cy = C / (p4 * (p1 + p2)), -C / (p2 * (p3 + p4))
        else:
            C = p1 * p2 * p3 * p4 * S / ((p2 + p4) * dd)
            cx, cy = -C / (p3 * (p1 + p2)), C / (p1 * (p3 + p4))

        def row(x, y):
            acc: dict = {}
            _delta(acc, cx, x, y, 1, 0)
            _delta(acc, cy, x, y, 0, 1)
            return acc

        return Stencil(row, N, N - 1, f"A_minus_{side}")
    if direction == "+":
        if N < 0:
            raise ValueError("N must be >= 0")
        c = dd / S
        fx, fy = (c / p1, -c / p3) if side == "R" else (-c / p2, c / p4)

        def row(x, y):
            return {(x - 1, y): x * fx, (x, y - 1): y * fy, (x, y): QQ(N + 1 - x - y)}

        return Stencil(row, N, N + 1, f"A_plus_{side}")
    raise ValueError(f"direction must be '+' or '-', got {direction!r}")


def build_ladder(side: str, direction: str, N: int, d, mode: str = EXACT) -> LatticeOperator:
    return _ladder_cached(side, direction, N, _as_derived(d), mode)


@lru_cache(maxsize=256)
def _ladder_cached(side, direction, N, d, mode):
    return ladder_stencil(side, direction, N, d).assemble(mode)


def _number_like(up: str, down: str, N: int, d, mode: str) -> LatticeOperator:
    """A_+^{(up,N-1)} A_-^{(down)} on T_N."""
    return compose(build_ladder(up, "+", N - 1, d, mode), build_ladder(down, "-", N, d, mode))


# Hamiltonians -------------------------------------------------------------

def build_hamiltonian(iso: bool, N: int, d, freqs: FrequencyPair | None = None,
                      mode: str = EXACT) -> LatticeOperator:
    """h_iso = Lambda1 + Lambda2, or h_aniso = w1^2 Lambda1 + w2^2 Lambda2."""
    if iso:
        if freqs is not None:
            raise ValueError("the isotropic Hamiltonian takes no frequencies")
        op = build_lambda(1, N, d, mode) + build_lambda(2, N, d, mode)
        op.name = "H_iso"
        return op
    if freqs is None:
        raise ValueError("the anisotropic Hamiltonian needs frequencies (omega1^2, omega2^2)")
    if not isinstance(freqs, FrequencyPair):
        raise TypeError("freqs must be a FrequencyPair")
    op = linear_combination([(freqs.omega1_sq, build_lambda(1, N, d, mode)),
                             (freqs.omega2_sq, build_lambda(2, N, d, mode))])
    op.name = "H_aniso"
    return op


def check_nn_condition(freqs: FrequencyPair, p) -> bool:
    """True iff (w1/w2)^2 = -(p1+p3)/(p2+p4), i.e. w1^2 (p2+p4) + w2^2 (p1+p3) = 0.

    Exactly then the Delta_{-x,y} and Delta_{x,-y} couplings of h_aniso
    cancel.  For positive p_i this needs a negative squared frequency ratio.
    """
    p1, p2, p3, p4 = _as_derived(p).p.as_tuple()
    return freqs.omega1_sq * (p2 + p4) + freqs.omega2_sq * (p1 + p3) == 0


def coupling_offsets(op: LatticeOperator) -> set[tuple[int, int]]:
    """All offsets (x' - x, y' - y) with a nonzero entry of a square operator."""
    if not op.is_square:
        raise ValueError("coupling offsets are defined for square operators")
    pts = op.domain.points
    out = set()
    for (i, j), _ in op.items():
        (x, y), (u, v) = pts[i], pts[j]
        out.add((u - x, v - y))
    return out


# SU(2) --------------------------------------------------------------------

@dataclass(frozen=True)
class SU2Operators:
    JX: LatticeOperator
    JY: LatticeOperator
    JZ: LatticeOperator
    Casimir: LatticeOperator

    def __iter__(self):
        return iter((self.JX, self.JY, self.JZ, self.Casimir))


def build_su2(N: int, d, mode: str = EXACT) -> SU2Operators:
    """J_X, J_Y, J_Z and Q = J_X^2 + J_Y^2 + J_Z^2 on T_N (N >= 1).

    J_Y carries the sign that yields [J_X, J_Y] = i J_Z.
    """
    if N < 1:
        raise ValueError("SU(2) generators need N >= 1")
    d = _as_derived(d)
    rl = _number_like("R", "L", N, d, mode)
    lr = _number_like("L", "R", N, d, mode)
    rr = _number_like("R", "R", N, d, mode)
    ll = _number_like("L", "L", N, d, mode)
    half = QQ(1, 2)
    jx = (rl + lr).scale(half)
    jy = (rl - lr).scale(QQ_I(0, -half) if mode == EXACT else -0.5j)
    jz = (rr - ll).scale(half)
    q = compose(jx, jx) + compose(jy, jy) + compose(jz, jz)
    for op, name in ((jx, "JX"), (jy, "JY"), (jz, "JZ"), (q, "Casimir")):
        op.name = name
    return SU2Operators(jx, jy, jz, q)


# Tratnik pair -------------------------------------------------------------

def _l2_weights(d: DerivedParams):
    p1, p2, p3, p4 = d.p.as_tuple()
    l2 = d.ell2
    return (l2 * p2 * p4 / (p2 + p4), l2 * p1 * p3 / (p1 + p3),
            l2 * p1 * p4 / (p2 + p4), l2 * p2 * p3 / (p1 + p3))


def build_tratnik_pair(N: int, d, mode: str = EXACT) -> tuple[LatticeOperator, LatticeOperator]:
    """(L1, L2) with L1 = h_iso and L2 built from A_+^{(., N-1)} A_-^{(.)}."""
    if N < 1:
        raise ValueError("the Tratnik operators need N >= 1")
    d = _as_derived(d)
    w_lr, w_rl, w1, w2 = _l2_weights(d)
    lam1, lam2 = build_lambda(1, N, d, mode), build_lambda(2, N, d, mode)
    L1 = lam1 + lam2
    L2 = linear_combination([
        (w_lr, _number_like("L", "R", N, d, mode)),
        (w_rl, _number_like("R", "L", N, d, mode)),
        (w1, lam1), (w2, lam2),
    ])
    L1.name, L2.name = "L1", "L2"
    return L1, L2


def l2_stencil(N: int, d) -> Stencil:
    """Pointwise form of L2, for evaluation far beyond matrix-friendly N."""
    d = _as_derived(d)
    w_lr, w_rl, w1, w2 = _l2_weights(d)
    lr = compose_stencils(ladder_stencil("L", "+", N - 1, d), ladder_stencil("R", "-", N, d))
    rl = compose_stencils(ladder_stencil("R", "+", N - 1, d), ladder_stencil("L", "-", N, d))
    s = combine([(w_lr, lr), (w_rl, rl), (w1, lambda_stencil(1, N, d)), (w2, lambda_stencil(2, N, d))])
    return Stencil(s.row, N, N, "L2")


def build_frak_k(N: int, d, mode: str = EXACT) -> LatticeOperator:
    """k = L1/2 - L2; Tratnik polynomials have eigenvalue (n1 - n2)/2."""
    L1, L2 = build_tratnik_pair(N, d, mode)
    op = L1.scale(QQ(1, 2)) - L2
    op.name = "FrakK"
    return op


# dispatcher ---------------------------------------------------------------

@dataclass(frozen=True)
class OperatorKind:
    """Names one operator of the model on a given lattice.

    For ladder kinds ``N`` is the domain; the codomain is N - 1 or N + 1.
    """

    tag: str
    N: int
    params: DerivedParams
    frequencies: FrequencyPair | None = None

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown operator kind {self.tag!r}; choose from {', '.join(KINDS)}")
        if self.N < 0:
            raise ValueError("N must be >= 0")

    @property
    def domain_N(self) -> int:
        return self.N

    @property
    def codomain_N(self) -> int:
        if self.tag in _LADDER_KINDS:
            return self.N - 1 if _LADDER_KINDS[self.tag][1] == "-" else self.N + 1
        return self.N


def build(kind: OperatorKind, mode: str = EXACT) -> LatticeOperator:
    tag, N, d = kind.tag, kind.N, kind.params
    if tag in ("Lambda1", "Lambda2"):
        op = build_lambda(int(tag[-1]), N, d, mode)
    elif tag == "FiveTerm":
        op = build_five_term(N, d, mode)
    elif tag in ("Rec1", "Rec2"):
        op = build_rec(int(tag[-1]), N, d, mode)
    elif tag in _LADDER_KINDS:
        side, direction = _LADDER_KINDS[tag]
        op = ladder_stencil(side, direction, N, d).assemble(mode)
    elif tag == "H_iso":
        op = build_hamiltonian(True, N, d, mode=mode)
    elif tag == "H_aniso":
        op = build_hamiltonian(False, N, d, kind.frequencies, mode=mode)
    elif tag in ("JX", "JY", "JZ", "Casimir"):
        op = getattr(build_su2(N, d, mode), tag)
    elif tag in ("L1", "L2"):
        op = build_tratnik_pair(N, d, mode)[int(tag[-1]) - 1]
    else:
        op = build_frak_k(N, d, mode)
    op.name = tag
    return op


__all__ = [
    "KINDS", "OperatorKind", "Stencil", "SU2Operators", "build", "build_five_term",
    "build_frak_k", "build_hamiltonian", "build_ladder", "build_lambda", "build_rec",
    "build_shift", "build_su2", "build_tratnik_pair", "check_nn_condition", "combine",
    "compose_stencils", "coupling_offsets", "five_term_stencil", "l2_stencil",
    "ladder_stencil", "lambda_stencil", "parse_direction", "rec_eigenvalue", "rec_stencil",
    "shift_stencil",
]
