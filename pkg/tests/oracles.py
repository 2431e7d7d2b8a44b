"""Independent reference evaluators built on fractions.Fraction.

They share no code with the package: sums are written out from the
definitions with plain Python rationals.
"""

from fractions import Fraction
from math import comb, factorial


def q(v):
    """Plain Fraction from int, Fraction or any numerator/denominator rational."""
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(int(v.numerator), int(v.denominator))


def rising(a, k):
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


def uv(p):
    p1, p2, p3, p4 = (q(x) for x in p)
    S = p1 + p2 + p3 + p4
    return ((p1 + p2) * (p1 + p3) / (p1 * S), (p1 + p3) * (p3 + p4) / (p3 * S),
            (p1 + p2) * (p2 + p4) / (p2 * S), (p2 + p4) * (p3 + p4) / (p4 * S))


def eta(p):
    p1, p2, p3, p4 = (q(x) for x in p)
    S = p1 + p2 + p3 + p4
    return (p1 * p2 * S / ((p1 + p2) * (p1 + p3) * (p2 + p4)),
            p3 * p4 * S / ((p2 + p4) * (p3 + p4) * (p1 + p3)))


def rahman(p, m, n, N, x, y):
    """Quadruple sum over i+j <= m, k+l <= n."""
    u1, v1, u2, v2 = uv(p)
    total = Fraction(0)
    for i in range(m + 1):
        for j in range(m + 1 - i):
            for k in range(n + 1):
                for l in range(n + 1 - k):
                    total += (rising(-m, i + j) * rising(-n, k + l) * rising(-x, i + k) * rising(-y, j + l)
                              / (factorial(i) * factorial(j) * factorial(k) * factorial(l)
                                 * rising(-N, i + j + k + l))
                              * u1 ** i * v1 ** j * u2 ** k * v2 ** l)
    return total


def krawtchouk(n, x, p, N):
    """Terminating 2F1(-n, -x; -N; 1/p)."""
    p = q(p)
    return sum(rising(-n, k) * rising(-x, k) / (rising(-N, k) * factorial(k)) / p ** k for k in range(n + 1))


def trinomial(x, y, N, e1, e2):
    e1, e2 = q(e1), q(e2)
    return (Fraction(factorial(N), factorial(x) * factorial(y) * factorial(N - x - y))
            * e1 ** x * e2 ** y * (1 - e1 - e2) ** (N - x - y))


def binomial(x, p, N):
    p = q(p)
    return comb(N, x) * p ** x * (1 - p) ** (N - x)


def points(N):
    return [(x, s - x) for s in range(N + 1) for x in range(s, -1, -1)]
