"""Triangular lattices, grid functions and linear operators between lattices.

Exact mode stores operators as sparse ``DomainMatrix`` objects over ``QQ``
(promoted to ``QQ_I`` as soon as an imaginary entry appears).  Float mode
stores ``scipy.sparse`` CSR matrices of complex doubles.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Mapping

import numpy as np
import scipy.sparse as sps
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import BoundaryCoefficientError, LatticeMismatchError, OutOfLatticeError

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

Point = tuple[int, int]


@dataclass(frozen=True, eq=False)
class TriLattice:
    """Points (x, y) with x, y >= 0 and x + y <= N.

    Canonical order: ascending x + y, and within one shell ascending y, so
    T_1 is [(0, 0), (1, 0), (0, 1)].
    """

    N: int
    points: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {pt: i for i, pt in enumerate(self.points)})

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, pt) -> bool:
        return pt in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, TriLattice) and other.N == self.N

    def __hash__(self) -> int:
        return hash(("TriLattice", self.N))

    def __repr__(self) -> str:
        return f"TriLattice(N={self.N}, size={len(self)})"

    def index(self, pt: Point) -> int:
        try:
            return self._index[pt]
        except KeyError:
            raise OutOfLatticeError(f"point {pt} is not in T_{self.N}") from None

    @property
    def size(self) -> int:
        return len(self.points)


@lru_cache(maxsize=None)
def enumerate_lattice(N: int) -> TriLattice:
    if int(N) != N or N < 0:
        raise ValueError(f"lattice size N must be a nonnegative integer, got {N!r}")
    N = int(N)
    pts = tuple((s - y, y) for s in range(N + 1) for y in range(s + 1))
    return TriLattice(N, pts)


def in_lattice(x: int, y: int, N: int) -> bool:
    return x >= 0 and y >= 0 and x + y <= N


def check_point(x: int, y: int, N: int) -> None:
    if int(x) != x or int(y) != y or not in_lattice(x, y, N):
        raise OutOfLatticeError(f"point ({x}, {y}) is not in T_{N} (need x, y >= 0, x + y <= {N})")


# -- scalars ---------------------------------------------------------------

_GAUSSIAN = type(QQ_I(0, 0))


def is_gaussian(v) -> bool:
    return isinstance(v, _GAUSSIAN)


def _sdm(m: DomainMatrix):
    return m.to_sparse().rep


def as_complex(c) -> complex:
    return complex(c) if isinstance(c, (int, float, complex)) else to_complex(c)


def is_real_exact(v) -> bool:
    return not is_gaussian(v) or v.y == 0


def exact_parts(v) -> tuple:
    """(re, im) of an exact scalar as QQ elements."""
    if is_gaussian(v):
        return v.x, v.y
    return QQ.convert(v), QQ(0)


def to_complex(v) -> complex:
    re, im = exact_parts(v)
    return complex(float(re), float(im))


def exact_abs(v):
    """max(|re|, |im|): a rational magnitude that is zero iff v is zero."""
    re, im = exact_parts(v)
    return max(abs(re), abs(im))


def _coerce_exact(v):
    if isinstance(v, complex):
        raise TypeError("complex floats cannot enter exact mode")
    if isinstance(v, float):
        raise TypeError("floats cannot enter exact mode")
    if is_gaussian(v):
        return v
    if isinstance(v, int):
        return QQ(v)
    return QQ(int(v.numerator), int(v.denominator))


# -- grid functions --------------------------------------------------------

class GridFunction:
    """A scalar value per lattice point, in exact or float mode."""

    __slots__ = ("lattice", "values", "mode")

    def __init__(self, lattice: TriLattice, values: Iterable[Any], mode: str = EXACT):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if mode == EXACT:
            vals = tuple(_coerce_exact(v) for v in values)
        else:
            vals = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                              dtype=complex)
        if len(vals) != lattice.size:
            raise LatticeMismatchError(
                f"{len(vals)} values given for {lattice!r} of size {lattice.size}")
        self.lattice = lattice
        self.values = vals
        self.mode = mode

    @classmethod
    def from_function(cls, lattice: TriLattice, fn: Callable[[int, int], Any],
                      mode: str = EXACT) -> "GridFunction":
        return cls(lattice, [fn(x, y) for x, y in lattice.points], mode)

    @classmethod
    def constant(cls, lattice: TriLattice, value: Any = 1, mode: str = EXACT) -> "GridFunction":
        return cls(lattice, [value] * lattice.size, mode)

    def __getitem__(self, pt: Point):
        return self.values[self.lattice.index(pt)]

    def __len__(self) -> int:
        return self.lattice.size

    def _check(self, other: "GridFunction"):
        if other.lattice != self.lattice:
            raise LatticeMismatchError(f"grid functions live on {self.lattice!r} and {other.lattice!r}")
        if other.mode != self.mode:
            raise LatticeMismatchError(f"cannot mix {self.mode} and {other.mode} grid functions")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        if self.mode == FLOAT:
            return GridFunction(self.lattice, self.values + other.values, FLOAT)
        return GridFunction(self.lattice, [_add(a, b) for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self + other.scale(-1)

    def scale(self, c) -> "GridFunction":
        if self.mode == FLOAT:
            return GridFunction(self.lattice, self.values * as_complex(c), FLOAT)
        c = _coerce_exact(c)
        return GridFunction(self.lattice, [_mul(c, v) for v in self.values])

    def to_float(self) -> "GridFunction":
        if self.mode == FLOAT:
            return self
        return GridFunction(self.lattice, np.array([to_complex(v) for v in self.values]), FLOAT)

    def max_abs(self):
        if self.mode == FLOAT:
            return float(np.max(np.abs(self.values))) if self.lattice.size else 0.0
        return max((exact_abs(v) for v in self.values), default=QQ(0))

    def is_zero(self) -> bool:
        if self.mode == FLOAT:
            return not np.any(self.values)
        return all(v == 0 for v in self.values)

    def equals(self, other: "GridFunction") -> bool:
        self._check(other)
        return (self - other).is_zero()

    def to_csv(self) -> str:
        """Columns x, y, re, im in canonical lattice order."""
        from .parameters import format_rational

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "re", "im"])
        for (x, y), v in zip(self.lattice.points, self.values):
            if self.mode == EXACT:
                re, im = exact_parts(v)
                w.writerow([x, y, format_rational(re), format_rational(im)])
            else:
                w.writerow([x, y, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    def __repr__(self) -> str:
        return f"GridFunction({self.lattice!r}, mode={self.mode})"


def _add(a, b):
    if is_real_exact(a) and is_real_exact(b):
        return exact_parts(a)[0] + exact_parts(b)[0]
    return _as_qqi(a) + _as_qqi(b)


def _mul(a, b):
    if is_real_exact(a) and is_real_exact(b):
        return exact_parts(a)[0] * exact_parts(b)[0]
    return _as_qqi(a) * _as_qqi(b)


def _as_qqi(v):
    if is_gaussian(v):
        return v
    return QQ_I.convert(QQ.convert(v))


def grid_from_csv(text: str, mode: str = EXACT) -> GridFunction:
    """Inverse of :meth:`GridFunction.to_csv`."""
    from .parameters import to_rational

    rows = list(csv.DictReader(io.StringIO(text)))
    N = max(int(r["x"]) + int(r["y"]) for r in rows) if rows else 0
    lat = enumerate_lattice(N)
    if len(rows) != lat.size:
        raise LatticeMismatchError(f"{len(rows)} rows do not fill T_{N} ({lat.size} points)")
    vals: list = [None] * lat.size
    for r in rows:
        i = lat.index((int(r["x"]), int(r["y"])))
        if mode == EXACT:
            re, im = to_rational(r["re"], "re"), to_rational(r["im"], "im")
            vals[i] = re if im == 0 else QQ_I(re, im)
        else:
            vals[i] = complex(float(r["re"]), float(r["im"]))
    return GridFunction(lat, vals, mode)


# -- operators -------------------------------------------------------------

class LatticeOperator:
    """Linear map from grid functions on ``domain`` to grid functions on ``codomain``.

    Rows are indexed by codomain points and columns by domain points, both in
    canonical order.
    """

    __slots__ = ("domain", "codomain", "mode", "_m", "name")

    def __init__(self, domain: TriLattice, codomain: TriLattice, matrix, mode: str, name: str = ""):
        if mode == EXACT and not isinstance(matrix, DomainMatrix):
            raise TypeError("exact operators need a DomainMatrix")
        if mode == FLOAT and not sps.issparse(matrix):
            raise TypeError("float operators need a scipy sparse matrix")
        if tuple(matrix.shape) != (codomain.size, domain.size):
            raise LatticeMismatchError(
                f"matrix shape {tuple(matrix.shape)} does not match "
                f"{codomain!r} x {domain!r}")
        self.domain = domain
        self.codomain = codomain
        self.mode = mode
        self._m = matrix
        self.name = name

    # construction ---------------------------------------------------------
    @classmethod
    def from_entries(cls, domain: TriLattice, codomain: TriLattice,
                     entries: Mapping[int, Mapping[int, Any]], name: str = "") -> "LatticeOperator":
        """Exact operator from ``{row: {col: value}}``; zero values are dropped."""
        rows: dict = {}
        complex_ = False
        for i, row in entries.items():
            clean = {}
            for j, v in row.items():
                v = _coerce_exact(v)
                if v != 0:
                    clean[j] = v
                    complex_ = complex_ or not is_real_exact(v)
            if clean:
                rows[i] = clean
        if complex_:
            rows = {i: {j: _as_qqi(v) for j, v in r.items()} for i, r in rows.items()}
            dom = QQ_I
        else:
            rows = {i: {j: exact_parts(v)[0] for j, v in r.items()} for i, r in rows.items()}
            dom = QQ
        return cls(domain, codomain, DomainMatrix(rows, (codomain.size, domain.size), dom), EXACT, name)

    @classmethod
    def from_stencil(cls, domain: TriLattice, codomain: TriLattice,
                     row: Callable[[int, int], Mapping[Point, Any]], name: str = "") -> "LatticeOperator":
        """Assemble from ``row(x, y) -> {(x', y'): coefficient}`` over codomain points.

        A target outside ``domain`` must carry an exactly-zero coefficient;
        anything else raises :class:`BoundaryCoefficientError`.
        """
        entries: dict = {}
        for i, (x, y) in enumerate(codomain.points):
            acc: dict = {}
            for (tx, ty), c in row(x, y).items():
                if c == 0:
                    continue
                if not in_lattice(tx, ty, domain.N):
                    raise BoundaryCoefficientError(
                        f"{name or 'operator'}: row ({x},{y}) on T_{codomain.N} couples to "
                        f"({tx},{ty}) outside T_{domain.N} with coefficient {c}")
                j = domain.index((tx, ty))
                acc[j] = acc.get(j, 0) + c
            entries[i] = acc
        return cls.from_entries(domain, codomain, entries, name)

    @classmethod
    def identity(cls, lattice: TriLattice, mode: str = EXACT) -> "LatticeOperator":
        if mode == FLOAT:
            return cls(lattice, lattice, sps.identity(lattice.size, dtype=complex, format="csr"), FLOAT, "I")
        return cls.from_entries(lattice, lattice, {i: {i: 1} for i in range(lattice.size)}, "I")

    @classmethod
    def zero(cls, domain: TriLattice, codomain: TriLattice, mode: str = EXACT) -> "LatticeOperator":
        if mode == FLOAT:
            return cls(domain, codomain, sps.csr_matrix((codomain.size, domain.size), dtype=complex), FLOAT, "0")
        return cls.from_entries(domain, codomain, {}, "0")

    # conversion -----------------------------------------------------------
    def to_float(self) -> "LatticeOperator":
        if self.mode == FLOAT:
            return self
        r, c, v = [], [], []
        for (i, j), val in self.items():
            r.append(i)
            c.append(j)
            v.append(to_complex(val))
        m = sps.csr_matrix((np.array(v, dtype=complex), (r, c)), shape=self._m.shape)
        return LatticeOperator(self.domain, self.codomain, m, FLOAT, self.name)

    def to_mode(self, mode: str) -> "LatticeOperator":
        if mode == self.mode:
            return self
        if mode == FLOAT:
            return self.to_float()
        raise ValueError("float operators cannot be converted back to exact mode")

    def items(self) -> Iterator[tuple[Point, Any]]:
        """Nonzero entries as ((row, col), value), ordered by row then column."""
        if self.mode == EXACT:
            rep = _sdm(self._m)
            for i in sorted(rep):
                row = rep[i]
                for j in sorted(row):
                    yield (i, j), row[j]
        else:
            coo = self._m.tocoo()
            order = np.lexsort((coo.col, coo.row))
            for k in order:
                if coo.data[k] != 0:
                    yield (int(coo.row[k]), int(coo.col[k])), complex(coo.data[k])

    def todense(self) -> np.ndarray:
        if self.mode == FLOAT:
            return self._m.toarray()
        out = np.zeros(self._m.shape, dtype=complex)
        for (i, j), v in self.items():
            out[i, j] = to_complex(v)
        return out

    def entry(self, row_pt: Point, col_pt: Point):
        i, j = self.codomain.index(row_pt), self.domain.index(col_pt)
        if self.mode == EXACT:
            return _sdm(self._m).get(i, {}).get(j, QQ(0))
        return complex(self._m[i, j])

    # algebra --------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self._m.shape)

    @property
    def is_square(self) -> bool:
        return self.domain == self.codomain

    def _same_shape(self, other: "LatticeOperator", what: str):
        if other.domain != self.domain or other.codomain != self.codomain:
            raise LatticeMismatchError(
                f"cannot {what} operators T_{self.domain.N}->T_{self.codomain.N} "
                f"and T_{other.domain.N}->T_{other.codomain.N}")
        if other.mode != self.mode:
            raise LatticeMismatchError(f"cannot {what} {self.mode} and {other.mode} operators")

    def __add__(self, other: "LatticeOperator") -> "LatticeOperator":
        self._same_shape(other, "add")
        return LatticeOperator(self.domain, self.codomain, self._m + other._m, self.mode)

    def __sub__(self, other: "LatticeOperator") -> "LatticeOperator":
        self._same_shape(other, "subtract")
        return LatticeOperator(self.domain, self.codomain, self._m - other._m, self.mode)

    def __neg__(self) -> "LatticeOperator":
        return self.scale(-1)

    def scale(self, c) -> "LatticeOperator":
        if self.mode == FLOAT:
            return LatticeOperator(self.domain, self.codomain, self._m * as_complex(c), FLOAT)
        c = _coerce_exact(c)
        if is_real_exact(c):
            c = exact_parts(c)[0]
            m = self._m
            if m.domain == QQ:
                return LatticeOperator(self.domain, self.codomain, m * c, EXACT)
            return LatticeOperator(self.domain, self.codomain, m * QQ_I.convert(c), EXACT)
        return LatticeOperator(self.domain, self.codomain, self._m.convert_to(QQ_I) * c, EXACT)

    def __rmul__(self, c) -> "LatticeOperator":
        return self.scale(c)

    def __matmul__(self, other):
        if isinstance(other, GridFunction):
            return apply(self, other)
        return compose(self, other)

    def max_abs(self):
        if self.mode == FLOAT:
            return float(abs(self._m).max()) if self._m.nnz else 0.0
        return max((exact_abs(v) for _, v in self.items()), default=QQ(0))

    def is_zero(self) -> bool:
        if self.mode == FLOAT:
            return self._m.count_nonzero() == 0
        return self._m.is_zero_matrix

    def equals(self, other: "LatticeOperator") -> bool:
        return (self - other).is_zero()

    @property
    def nnz(self) -> int:
        return sum(1 for _ in self.items())

    def to_coo_csv(self) -> str:
        """Coordinate list with columns row, col, re, im (nonzeros only)."""
        from .parameters import format_rational

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for (i, j), v in self.items():
            if self.mode == EXACT:
                re, im = exact_parts(v)
                w.writerow([i, j, format_rational(re), format_rational(im)])
            else:
                w.writerow([i, j, repr(v.real), repr(v.imag)])
        return buf.getvalue()

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"<LatticeOperator {label}T_{self.domain.N} -> T_{self.codomain.N} ({self.mode})>"


def apply(op: LatticeOperator, f: GridFunction) -> GridFunction:
    if f.lattice != op.domain:
        raise LatticeMismatchError(
            f"operator acts on T_{op.domain.N} but the grid function lives on T_{f.lattice.N}")
    if f.mode != op.mode:
        raise LatticeMismatchError(f"cannot apply a {op.mode} operator to a {f.mode} grid function")
    if op.mode == FLOAT:
        return GridFunction(op.codomain, op._m @ f.values, FLOAT)
    complex_f = any(not is_real_exact(v) for v in f.values)
    dom = QQ_I if (complex_f or op._m.domain == QQ_I) else QQ
    col = {i: {0: (_as_qqi(v) if dom == QQ_I else exact_parts(v)[0])}
           for i, v in enumerate(f.values) if v != 0}
    vec = DomainMatrix(col, (op.domain.size, 1), dom)
    m = op._m if op._m.domain == dom else op._m.convert_to(dom)
    out = m * vec
    rep = _sdm(out)
    zero = QQ(0)
    vals = [rep.get(i, {}).get(0, zero) for i in range(op.codomain.size)]
    if dom == QQ_I:
        vals = [v.x if (is_gaussian(v) and v.y == 0) else v for v in vals]
    return GridFunction(op.codomain, vals, EXACT)


def compose(a: LatticeOperator, b: LatticeOperator) -> LatticeOperator:
    """The product a∘b (apply b first)."""
    if b.codomain != a.domain:
        raise LatticeMismatchError(
            f"ill-typed composition: left operator maps T_{a.domain.N}->T_{a.codomain.N} "
            f"(shape {a.shape}), right operator maps T_{b.domain.N}->T_{b.codomain.N} "
            f"(shape {b.shape})")
    if a.mode != b.mode:
        raise LatticeMismatchError(f"cannot compose {a.mode} and {b.mode} operators")
    return LatticeOperator(b.domain, a.codomain, a._m * b._m if a.mode == EXACT else a._m @ b._m, a.mode)


def commutator(a: LatticeOperator, b: LatticeOperator) -> LatticeOperator:
    """ab - ba; both products must be well typed, so both operators are square on one lattice."""
    if not (a.is_square and b.is_square and a.domain == b.domain):
        raise LatticeMismatchError(
            f"commutator needs square operators on one lattice, got shapes {a.shape} "
            f"(T_{a.domain.N}->T_{a.codomain.N}) and {b.shape} (T_{b.domain.N}->T_{b.codomain.N})")
    return compose(a, b) - compose(b, a)


def linear_combination(terms: Iterable[tuple[Any, LatticeOperator]]) -> LatticeOperator:
    out = None
    for c, op in terms:
        t = op.scale(c)
        out = t if out is None else out + t
    if out is None:
        raise ValueError("empty linear combination")
    return out
