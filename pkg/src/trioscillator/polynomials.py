"""Polynomial families on the triangular lattice and their weights.

Every evaluator takes a ``mode``: ``"exact"`` works in QQ (all coefficients
are rational), ``"float"`` in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from sympy.polys.domains import QQ

from .errors import OutOfLatticeError, PropagationError
from .lattice import EXACT, FLOAT, MODES, GridFunction, check_point, enumerate_lattice
from .parameters import DerivedParams, to_rational


def _num(mode: str):
    if mode == EXACT:
        return QQ
    if mode == FLOAT:
        return float
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def pochhammer(a, k: int):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1)."""
    out = a * 0 + 1  # keeps the numeric type of a for k == 0
    for i in range(k):
        out *= a + i
    return out


@dataclass(frozen=True)
class PolyIndex:
    m: int
    n: int
    N: int

    def __post_init__(self):
        for name in ("m", "n", "N"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.m + self.n > self.N:
            raise ValueError(f"degree m+n={self.m + self.n} exceeds N={self.N}")

    @property
    def j(self):
        """SU(2) spin label (m+n)/2."""
        return QQ(self.m + self.n, 2)


def all_indices(N: int) -> list[PolyIndex]:
    """Every (m, n) with m+n <= N, lowest total degree first."""
    return [PolyIndex(s - n, n, N) for s in range(N + 1) for n in range(s + 1)]


def _as_index(idx) -> PolyIndex:
    return idx if isinstance(idx, PolyIndex) else PolyIndex(*idx)


# -- univariate ------------------------------------------------------------

def _krawtchouk_poly(n: int, x, p, M, num):
    # sum_j (-n)_j (-x)_j / j! * (-M + j)_{n-j} * p^{-j}; equals (-M)_n 2F1(-n,-x;-M;1/p)
    # and stays finite when M < n.
    inv_p = num(1) / p
    total = num(0)
    term_pow = num(1)
    for j in range(n + 1):
        total += pochhammer(num(-n), j) * pochhammer(num(-x), j) / math.factorial(j) \
            * pochhammer(num(-M + j), n - j) * term_pow
        term_pow *= inv_p
    return total


def krawtchouk1(n: int, x: int, p, N: int, mode: str = EXACT):
    """K_n(x; p; N) including the (-N)_n prefactor, so K_1 = -N + x/p."""
    num = _num(mode)
    if not (0 <= n <= N):
        raise ValueError(f"need 0 <= n <= N, got n={n}, N={N}")
    if not (0 <= x <= N):
        raise OutOfLatticeError(f"x={x} outside [0, {N}]")
    p = float(p) if mode == FLOAT else to_rational(p, "p")
    if p == 0:
        raise ValueError("Krawtchouk parameter p must be nonzero")
    return _krawtchouk_poly(n, x, p, N, num)


def binomial_weight(x: int, p, N: int, mode: str = EXACT):
    p = float(p) if mode == FLOAT else to_rational(p, "p")
    return math.comb(N, x) * p ** x * (1 - p) ** (N - x)


# -- Rahman ----------------------------------------------------------------

@lru_cache(maxsize=4096)
def _rahman_tables(m: int, n: int, N: int, d: DerivedParams, mode: str):
    num = _num(mode)
    u1, v1, u2, v2 = (num(q) if mode == FLOAT else q for q in (d.u1, d.v1, d.u2, d.v2))

    def powfact(base, top):
        out, acc = [], num(1)
        for i in range(top + 1):
            out.append(acc / math.factorial(i))
            acc *= base
        return out

    U1, V1 = powfact(u1, m), powfact(v1, m)
    U2, V2 = powfact(u2, n), powfact(v2, n)
    pm = [pochhammer(num(-m), a) for a in range(m + 1)]
    pn = [pochhammer(num(-n), a) for a in range(n + 1)]
    pN = [pochhammer(num(-N), a) for a in range(m + n + 1)]
    # coefficient of (-x)_{i+k} (-y)_{j+l}
    terms = []
    for i in range(m + 1):
        for j in range(m + 1 - i):
            cij = pm[i + j] * U1[i] * V1[j]
            for k in range(n + 1):
                for l in range(n + 1 - k):
                    c = cij * pn[k + l] * U2[k] * V2[l] / pN[i + j + k + l]
                    if c != 0:
                        terms.append((i + k, j + l, c))
    merged: dict = {}
    for a, b, c in terms:
        merged[(a, b)] = merged.get((a, b), 0) + c
    return tuple((a, b, c) for (a, b), c in merged.items() if c != 0), num


def rahman_eval(idx, d: DerivedParams, x: int, y: int, mode: str = EXACT):
    """K_{m,n}^N(x, y) by the truncated quadruple sum (i+j <= m, k+l <= n)."""
    idx = _as_index(idx)
    check_point(x, y, idx.N)
    terms, num = _rahman_tables(idx.m, idx.n, idx.N, d, mode)
    px = [pochhammer(num(-x), a) for a in range(idx.m + idx.n + 1)]
    py = [pochhammer(num(-y), b) for b in range(idx.m + idx.n + 1)]
    total = num(0)
    for a, b, c in terms:
        if a <= x and b <= y:
            total += c * px[a] * py[b]
    return total


def rahman_eval_full_sum(idx, d: DerivedParams, x: int, y: int):
    """Untruncated sum over i+j+k+l <= N, exact.  Brute-force oracle for small N."""
    idx = _as_index(idx)
    check_point(x, y, idx.N)
    m, n, N = idx.m, idx.n, idx.N
    total = QQ(0)
    for i in range(N + 1):
        for j in range(N + 1 - i):
            for k in range(N + 1 - i - j):
                for l in range(N + 1 - i - j - k):
                    s = i + j + k + l
                    total += (pochhammer(QQ(-m), i + j) * pochhammer(QQ(-n), k + l)
                              * pochhammer(QQ(-x), i + k) * pochhammer(QQ(-y), j + l)
                              / (math.factorial(i) * math.factorial(j) * math.factorial(k)
                                 * math.factorial(l) * pochhammer(QQ(-N), s))
                              * d.u1 ** i * d.v1 ** j * d.u2 ** k * d.v2 ** l)
    return total


def rahman_grid(idx, d: DerivedParams, mode: str = EXACT) -> GridFunction:
    idx = _as_index(idx)
    lat = enumerate_lattice(idx.N)
    return GridFunction(lat, [rahman_eval(idx, d, x, y, mode) for x, y in lat.points], mode)


def rahman_eval_grid_recurrence(idx, d: DerivedParams) -> GridFunction:
    """K_{m,n}^N on all of T_N by sweeping the two recurrence relations.

    Starts from K(0,0) = 1 with K = 0 at negative x or y, then fills each
    shell x+y = s+1 from shell s: K(x+1, y) from the first relation at
    (x, y), and K(0, s+1) from the second relation at (0, s).
    """
    idx = _as_index(idx)
    m, n, N = idx.m, idx.n, idx.N
    p1, p2, p3, p4 = d.p.as_tuple()
    S, dd = d.sum_p, d.delta
    lam1 = p2 * (p1 + p3) * m + p1 * (p2 + p4) * n
    lam2 = p4 * (p1 + p3) * m + p3 * (p2 + p4) * n
    A1 = p1 * p2 * S / (p1 + p2)
    A2 = p3 * p4 * S / (p3 + p4)
    B = dd * dd / ((p1 + p2) * (p3 + p4))
    C1 = p3 * p4 * (p1 + p2) / (p3 + p4)
    E2 = p1 * p2 * (p3 + p4) / (p1 + p2)

    K: dict = {(0, 0): QQ(1)}

    def val(x, y):
        if x < 0 or y < 0:
            return QQ(0)
        return K[(x, y)]

    for s in range(N):
        for x in range(s, -1, -1):
            y = s - x
            k0 = val(x, y)
            # relation 1 solved for K(x+1, y):
            # lam1 k0 = -[(N-s) A1 (K(x+1,y)-k0) + x B (K(x-1,y)-k0)
            #            + x C1 (K(x-1,y+1)-k0) + y p1 p2 (K(x+1,y-1)-k0)]
            pivot = (N - s) * A1
            if pivot == 0:
                raise PropagationError(f"relation 1 has a zero pivot at ({x},{y}), N={N}")
            rest = (x * B * (val(x - 1, y) - k0) + x * C1 * (val(x - 1, y + 1) - k0)
                    + y * p1 * p2 * (val(x + 1, y - 1) - k0))
            K[(x + 1, y)] = k0 + (-lam1 * k0 - rest) / pivot
        # relation 2 at (0, s) solved for K(0, s+1):
        # lam2 k0 = -[(N-s) A2 (K(0,s+1)-k0) + s B (K(0,s-1)-k0) + s E2 (K(1,s-1)-k0)]
        k0 = val(0, s)
        pivot = (N - s) * A2
        if pivot == 0:
            raise PropagationError(f"relation 2 has a zero pivot at (0,{s}), N={N}")
        rest = s * B * (val(0, s - 1) - k0) + s * E2 * (val(1, s - 1) - k0)
        K[(0, s + 1)] = k0 + (-lam2 * k0 - rest) / pivot

    lat = enumerate_lattice(N)
    return GridFunction(lat, [K[pt] for pt in lat.points], EXACT)


# -- weights and norms -------------------------------------------------------

def trinomial_weight(x: int, y: int, N: int, eta1, eta2, mode: str = EXACT):
    check_point(x, y, N)
    num = _num(mode)
    if mode == FLOAT:
        e1, e2 = float(eta1), float(eta2)
    else:
        e1, e2 = to_rational(eta1, "eta1"), to_rational(eta2, "eta2")
    if not (e1 > 0 and e2 > 0 and e1 + e2 < 1):
        raise ValueError(f"eta=({eta1}, {eta2}) is not in the open simplex")
    e3 = 1 - e1 - e2
    if mode == FLOAT and N > 150:
        logw = (math.lgamma(N + 1) - math.lgamma(x + 1) - math.lgamma(y + 1)
                - math.lgamma(N - x - y + 1)
                + x * math.log(e1) + y * math.log(e2) + (N - x - y) * math.log(e3))
        return math.exp(logw)
    coef = math.factorial(N) // (math.factorial(x) * math.factorial(y) * math.factorial(N - x - y))
    return num(coef) * e1 ** x * e2 ** y * e3 ** (N - x - y)


def weight_grid(N: int, d: DerivedParams, mode: str = EXACT) -> GridFunction:
    lat = enumerate_lattice(N)
    return GridFunction(lat, [trinomial_weight(x, y, N, d.eta1, d.eta2, mode) for x, y in lat.points], mode)


def norm_I(idx, d: DerivedParams):
    """Squared norm sum_{T_N} w K_{m,n}^2, exact."""
    idx = _as_index(idx)
    m, n, N = idx.m, idx.n, idx.N
    p1, p2, p3, p4 = d.p.as_tuple()
    num = QQ(math.factorial(m) * math.factorial(n) * math.factorial(N - m - n), math.factorial(N))
    return num * d.delta ** (2 * (m + n)) / (
        (p1 * p3 * (p2 + p4)) ** m * (p2 * p4 * (p1 + p3)) ** n * d.sum_p ** (m + n))


@dataclass(frozen=True)
class NormalizationConstant:
    """alpha_{m,n}^N with K_hat = alpha K.  alpha**2 is rational; alpha itself is not."""

    alpha_sq: object
    sign: int
    normI: object
    log_abs_alpha: float

    @property
    def alpha(self) -> float:
        return self.sign * math.exp(self.log_abs_alpha)

    def exact_alpha(self):
        """alpha as a rational when alpha**2 is a perfect square, else None."""
        num, den = int(self.alpha_sq.numerator), int(self.alpha_sq.denominator)
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return self.sign * QQ(rn, rd)
        return None


def normalization(idx, d: DerivedParams) -> NormalizationConstant:
    idx = _as_index(idx)
    m, n, N = idx.m, idx.n, idx.N
    p1, p2, p3, p4 = d.p.as_tuple()
    P1 = p1 * p3 * (p2 + p4)
    P2 = p2 * p4 * (p1 + p3)
    k = m + n
    alpha_sq = (2 * d.sum_p) ** k / d.delta ** (2 * k) * QQ(math.factorial(N), math.factorial(N - k)) \
        * P1 ** m * P2 ** n
    sign = (-1) ** k * (1 if d.delta > 0 else -1) ** k
    log_abs = 0.5 * (k * math.log(2 * float(d.sum_p)) - 2 * k * math.log(abs(float(d.delta)))
                     + math.lgamma(N + 1) - math.lgamma(N - k + 1)
                     + m * math.log(float(P1)) + n * math.log(float(P2)))
    return NormalizationConstant(alpha_sq, sign, norm_I(idx, d), log_abs)


def rahman_normalized_eval(idx, d: DerivedParams, x: int, y: int) -> float:
    """K_hat_{m,n}^N(x, y) in floating point."""
    return normalization(idx, d).alpha * rahman_eval(idx, d, x, y, FLOAT)


def rahman_normalized(idx, d: DerivedParams, mode: str = FLOAT) -> tuple[GridFunction, NormalizationConstant]:
    """K_hat = alpha K on T_N.

    In exact mode this only succeeds when alpha is rational; otherwise use
    ``normalization(idx, d).alpha_sq`` and test identities on squares.
    """
    idx = _as_index(idx)
    const = normalization(idx, d)
    if mode == EXACT:
        alpha = const.exact_alpha()
        if alpha is None:
            raise ValueError(
                f"alpha_{idx.m},{idx.n}^{idx.N} is irrational (alpha^2 = {const.alpha_sq}); "
                "use mode='float'")
        return rahman_grid(idx, d, EXACT).scale(alpha), const
    return rahman_grid(idx, d, FLOAT).scale(const.alpha), const


# -- Tratnik -----------------------------------------------------------------

def tratnik_eval(n1: int, n2: int, x: int, y: int, d: DerivedParams, N: int, mode: str = EXACT):
    """k_{n1}(x; p1; N-n2) / (-N)_{n1+n2} * k_{n2}(y; p2/(1-p1); N-x)."""
    if n1 < 0 or n2 < 0 or n1 + n2 > N:
        raise ValueError(f"Tratnik indices need n1, n2 >= 0 and n1+n2 <= N, got ({n1}, {n2}), N={N}")
    check_point(x, y, N)
    num = _num(mode)
    fp1, fp2 = (float(d.frak_p1), float(d.frak_p2)) if mode == FLOAT else (d.frak_p1, d.frak_p2)
    first = _krawtchouk_poly(n1, x, fp1, N - n2, num)
    second = _krawtchouk_poly(n2, y, fp2 / (1 - fp1), N - x, num)
    return first / pochhammer(num(-N), n1 + n2) * second


def tratnik_grid(n1: int, n2: int, d: DerivedParams, N: int, mode: str = EXACT) -> GridFunction:
    lat = enumerate_lattice(N)
    return GridFunction(lat, [tratnik_eval(n1, n2, x, y, d, N, mode) for x, y in lat.points], mode)


# -- Hermite -----------------------------------------------------------------

def hermite(n: int, s):
    """Physicists' Hermite polynomial H_n(s); works on scalars and numpy arrays."""
    if n < 0:
        raise ValueError("Hermite degree must be >= 0")
    h_prev, h = 1 + 0 * s, 2 * s
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * s * h - 2 * k * h_prev
    return h
