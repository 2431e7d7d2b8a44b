"""Model parameters and every constant derived from them.

All rational quantities are stored as elements of sympy's ``QQ`` domain
(``gmpy2.mpq`` when gmpy2 is installed), which compare equal to
``fractions.Fraction``.  The rotation coefficient ``b`` is purely imaginary
and lives in ``QQ_I``.  The continuum scaling coefficients ``c1..c4`` contain
square roots and are plain floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from sympy.polys.domains import QQ, QQ_I

from .errors import DegenerateParametersError


def to_rational(value: Any, name: str = "value"):
    """Convert int, Fraction, mpq or a ``"num/den"`` string to a QQ element."""
    if isinstance(value, bool):
        raise TypeError(f"{name}: booleans are not rationals")
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: cannot parse {value!r} as a rational") from exc
        return QQ(frac.numerator, frac.denominator)
    if isinstance(value, float):
        raise TypeError(f"{name}: floats are not accepted, pass 'num/den' instead")
    try:
        return QQ(int(value.numerator), int(value.denominator))
    except AttributeError:
        raise TypeError(f"{name}: unsupported type {type(value).__name__}") from None


def format_rational(q) -> str:
    """Serialize a rational as ``"num/den"`` (or ``"num"`` for integers)."""
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


@dataclass(frozen=True)
class RahmanParams:
    """The four positive rationals p1..p4 defining the Rahman polynomials."""

    p1: Any
    p2: Any
    p3: Any
    p4: Any

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4"):
            q = to_rational(getattr(self, name), name)
            if q <= 0:
                raise DegenerateParametersError(f"{name} must be > 0, got {format_rational(q)}")
            object.__setattr__(self, name, q)
        if self.p1 * self.p4 == self.p2 * self.p3:
            raise DegenerateParametersError(
                "degenerate parameters: p1*p4 == p2*p3 "
                f"({format_rational(self.p1 * self.p4)}); the difference divides every "
                "Lambda and ladder coefficient"
            )

    @classmethod
    def from_sequence(cls, values: Sequence[Any]) -> "RahmanParams":
        if len(values) != 4:
            raise ValueError(f"expected 4 parameters p1..p4, got {len(values)}")
        return cls(*values)

    @classmethod
    def parse(cls, text: str) -> "RahmanParams":
        """Parse ``"p1,p2,p3,p4"`` with each entry an integer or ``num/den``."""
        parts = [s for s in text.split(",") if s.strip()]
        if len(parts) != 4:
            raise ValueError(f"--params expects 4 comma-separated rationals, got {text!r}")
        return cls(*(to_rational(s, f"p{i + 1}") for i, s in enumerate(parts)))

    def as_tuple(self) -> tuple:
        return (self.p1, self.p2, self.p3, self.p4)

    def label(self) -> str:
        return ",".join(format_rational(q) for q in self.as_tuple())


@dataclass(frozen=True)
class FrequencyPair:
    """Anisotropic coupling; only the squares omega1**2, omega2**2 enter the model.

    Exact mode keeps things rational by storing the squared frequencies
    directly.  ``positive=False`` admits formal (e.g. negative) squares, used
    when probing the nearest-neighbour condition.
    """

    omega1_sq: Any
    omega2_sq: Any
    positive: bool = True

    def __post_init__(self):
        for name in ("omega1_sq", "omega2_sq"):
            q = to_rational(getattr(self, name), name)
            if self.positive and q <= 0:
                raise ValueError(f"{name} must be > 0, got {format_rational(q)}")
            object.__setattr__(self, name, q)

    @classmethod
    def from_omegas(cls, omega1: Any, omega2: Any) -> "FrequencyPair":
        w1, w2 = to_rational(omega1, "omega1"), to_rational(omega2, "omega2")
        if w1 <= 0 or w2 <= 0:
            raise ValueError("omega1, omega2 must be > 0")
        return cls(w1 * w1, w2 * w2)


@dataclass(frozen=True)
class DerivedParams:
    """Every constant of the model, computed once from :class:`RahmanParams`."""

    p: RahmanParams
    sum_p: Any
    delta: Any  # p1*p4 - p2*p3, signed; never zero
    u1: Any
    u2: Any
    v1: Any
    v2: Any
    eta1: Any
    eta2: Any
    frak_p1: Any
    frak_p2: Any
    ell2: Any
    a: Any
    b: Any
    c: Any
    c1: float
    c2: float
    c3: float
    c4: float
    det2: float

    @property
    def eta3(self):
        return 1 - self.eta1 - self.eta2

    @property
    def coords_matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.c1, self.c2), (self.c3, self.c4))


def _functional_residuals(d: DerivedParams) -> list:
    return [
        d.u1 * d.eta1 + d.v1 * d.eta2 - 1,
        d.u2 * d.eta1 + d.v2 * d.eta2 - 1,
        d.u1 * d.u2 * d.eta1 + d.v1 * d.v2 * d.eta2 - 1,
    ]


def derive_params(p: RahmanParams | Iterable[Any]) -> DerivedParams:
    """Compute u, v, eta, ell2, rotation and scaling coefficients.

    Invariants are checked before returning: the three functional relations
    hold exactly, eta lies in the open simplex, a^2+b^2+c^2 == 1 exactly, and
    |c1*c4 - c2*c3| matches 2*sqrt(eta1*eta2*(1-eta1-eta2)) to 1e-12.
    """
    if not isinstance(p, RahmanParams):
        p = RahmanParams.from_sequence(list(p))
    p1, p2, p3, p4 = p.as_tuple()
    S = p1 + p2 + p3 + p4
    delta = p1 * p4 - p2 * p3

    u1 = (p1 + p2) * (p1 + p3) / (p1 * S)
    u2 = (p1 + p2) * (p2 + p4) / (p2 * S)
    v1 = (p1 + p3) * (p3 + p4) / (p3 * S)
    v2 = (p2 + p4) * (p3 + p4) / (p4 * S)
    eta1 = p1 * p2 * S / ((p1 + p2) * (p1 + p3) * (p2 + p4))
    eta2 = p3 * p4 * S / ((p2 + p4) * (p3 + p4) * (p1 + p3))

    ell2 = 1 / (p1 * p4 / (p2 + p4) + p2 * p3 / (p1 + p3))
    # a carries the opposite sign to the printed formula: with J_Y chosen so
    # that [J_X, J_Y] = i J_Z, only this sign makes k = a J_X + b J_Y + c J_Z.
    a = -ell2 * (p2 * p4 / (p2 + p4) + p1 * p3 / (p1 + p3))
    b = QQ_I(QQ(0), ell2 * (p2 * p4 / (p2 + p4) - p1 * p3 / (p1 + p3)))
    c = 2 * ell2 * p2 * p3 / (p1 + p3) - 1

    fS, f1, f2, f3, f4 = (float(q) for q in (S, p1, p2, p3, p4))
    r13 = math.sqrt(2 * fS * f1 * f3 / (f2 + f4))
    r24 = math.sqrt(2 * fS * f2 * f4 / (f1 + f3))
    c1 = -f2 / ((f1 + f2) * (f1 + f3)) * r13
    c2 = f1 / ((f1 + f2) * (f2 + f4)) * r24
    # c3 multiplies s like c1, so it shares c1's radicand.
    c3 = f4 / ((f3 + f4) * (f1 + f3)) * r13
    c4 = -f3 / ((f3 + f4) * (f2 + f4)) * r24

    d = DerivedParams(
        p=p, sum_p=S, delta=delta, u1=u1, u2=u2, v1=v1, v2=v2,
        eta1=eta1, eta2=eta2, frak_p1=eta1, frak_p2=eta2, ell2=ell2,
        a=a, b=b, c=c, c1=c1, c2=c2, c3=c3, c4=c4,
        det2=abs(c1 * c4 - c2 * c3),
    )

    if any(r != 0 for r in _functional_residuals(d)):
        raise AssertionError("functional relations violated; derived constants are inconsistent")
    if not (eta1 > 0 and eta2 > 0 and eta1 + eta2 < 1):
        raise AssertionError("eta outside the open simplex")
    a_c = QQ_I.convert(a)
    c_c = QQ_I.convert(c)
    if a_c * a_c + b * b + c_c * c_c != QQ_I(1, 0):
        raise AssertionError("rotation coefficients are not on the unit sphere")
    expected = 2 * math.sqrt(float(eta1 * eta2 * d.eta3))
    if abs(d.det2 - expected) > 1e-12 * expected:
        raise AssertionError(f"|c1 c4 - c2 c3| = {d.det2} differs from {expected}")
    return d


@dataclass(frozen=True)
class FunctionalRelationCase:
    id: str
    residual: Any

    @property
    def passed(self) -> bool:
        return self.residual == 0


def check_functional_relations(d: DerivedParams) -> list[FunctionalRelationCase]:
    """Residuals of u1 eta1 + v1 eta2 = 1, u2 eta1 + v2 eta2 = 1, u1 u2 eta1 + v1 v2 eta2 = 1."""
    return [FunctionalRelationCase(f"fr.{i + 1}", r) for i, r in enumerate(_functional_residuals(d))]


def load_params_file(path: str | Path) -> tuple[RahmanParams, FrequencyPair | None]:
    """Read a JSON (or flat ``key = value`` text) parameter file.

    Keys: p1..p4 as ``"num/den"`` strings or integers; optional omega1,
    omega2 (frequencies) or omega1_sq, omega2_sq (their squares).
    """
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line and ":" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.replace(":", "=", 1).partition("=")
            raw[key.strip()] = value.strip().strip('"').strip("'")
    missing = [k for k in ("p1", "p2", "p3", "p4") if k not in raw]
    if missing:
        raise ValueError(f"{path}: missing keys {', '.join(missing)}")
    params = RahmanParams(*(to_rational(str(raw[k]), k) for k in ("p1", "p2", "p3", "p4")))
    freqs = None
    if "omega1_sq" in raw or "omega2_sq" in raw:
        freqs = FrequencyPair(str(raw["omega1_sq"]), str(raw["omega2_sq"]))
    elif "omega1" in raw or "omega2" in raw:
        freqs = FrequencyPair.from_omegas(to_rational(str(raw["omega1"]), "omega1"),
                                          to_rational(str(raw["omega2"]), "omega2"))
    return params, freqs


def params_to_dict(p: RahmanParams, freqs: FrequencyPair | None = None) -> dict:
    out = {f"p{i + 1}": format_rational(q) for i, q in enumerate(p.as_tuple())}
    if freqs is not None:
        out["omega1_sq"] = format_rational(freqs.omega1_sq)
        out["omega2_sq"] = format_rational(freqs.omega2_sq)
    return out
