"""Multivariate counterpart of ratfunc for many-sided coins.

A word over an s-letter alphabet has probability prod(x_j^(count of j)),
where x_0..x_(s-1) are the letter probabilities summing to one.  Polynomials
here are dicts mapping exponent tuples of length s to integer coefficients;
rational functions are plain num/den pairs without any canonical-form claim
(equality is decided by cross-multiplication).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .errors import CapExceeded, DivisionByZero
from .ratfunc import IntPolynomial, RationalFunction

MultiPoly = dict  # exponent tuple -> int


def multinomial(counts) -> int:
    total = 0
    out = 1
    for c in counts:
        total += c
        out *= comb(total, c)
    return out


def compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def m_strip(poly: MultiPoly) -> MultiPoly:
    return {a: c for a, c in poly.items() if c != 0}

def m_const(s: int, c: int) -> MultiPoly:
    return {(0,) * s: c} if c else {}

def m_var(s: int, j: int) -> MultiPoly:
    a = [0] * s
    a[j] = 1
    return {tuple(a): 1}

def m_add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + c
    return m_strip(out)

def m_neg(a: MultiPoly) -> MultiPoly:
    return {k: -c for k, c in a.items()}

def m_sub(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return m_add(a, m_neg(b))

def m_mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    out: MultiPoly = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + ca * cb
    return m_strip(out)

def m_scale(a: MultiPoly, c: int) -> MultiPoly:
    return m_strip({k: c * v for k, v in a.items()})

def m_total_degree(a: MultiPoly) -> int:
    return max((sum(k) for k in a), default=-1)

def m_eval(a: MultiPoly, point) -> Fraction:
    acc = Fraction(0)
    for k, c in a.items():
        term = Fraction(c)
        for e, x in zip(k, point):
            term *= Fraction(x) ** e
        acc += term
    return acc

def m_content(a: MultiPoly) -> int:
    g = 0
    for c in a.values():
        g = gcd(g, c)
    return g


def simplex_mul(a: MultiPoly, s: int) -> MultiPoly:
    """Multiply by (x_0 + ... + x_(s-1))."""
    out: MultiPoly = {}
    for k, c in a.items():
        for j in range(s):
            k2 = k[:j] + (k[j] + 1,) + k[j + 1:]
            out[k2] = out.get(k2, 0) + c
    return out


def homogenize_to(a: MultiPoly, s: int, k: int) -> MultiPoly:
    """Pad every term of total degree d with (x_0+...+x_(s-1))^(k-d)."""
    out: MultiPoly = {}
    for key, c in a.items():
        d = sum(key)
        if d > k:
            raise ValueError("degree exceeds target")
        for spread in compositions(k - d, s):
            k2 = tuple(x + y for x, y in zip(key, spread))
            out[k2] = out.get(k2, 0) + c * multinomial(spread)
    return m_strip(out)


def m_simplex_substitute(a: MultiPoly, s: int) -> MultiPoly:
    """Substitute x_0 = 1 - x_1 - ... - x_(s-1).

    The result mentions only x_1..x_(s-1); two polynomials agree on the
    probability simplex exactly when their substituted forms are equal.
    """
    repl: MultiPoly = {(0,) * s: 1}
    for j in range(1, s):
        repl[tuple(1 if i == j else 0 for i in range(s))] = -1
    out: MultiPoly = {}
    for key, c in a.items():
        term: MultiPoly = {(0,) + key[1:]: c}
        for _ in range(key[0]):
            term = m_mul(term, repl)
        out = m_add(out, term)
    return out


def polya_multi(a: MultiPoly, s: int, cap: int = 200) -> int:
    """Smallest n <= cap with (x_0+...+x_(s-1))^n * a free of negative
    coefficients."""
    cur = m_strip(a)
    for n in range(cap + 1):
        if all(c >= 0 for c in cur.values()):
            return n
        cur = simplex_mul(cur, s)
    raise CapExceeded(cap, f"no nonnegative representation within exponent {cap}")


@dataclass
class MultiRational:
    """num/den pair over s letter variables; no canonical form."""

    s: int
    num: MultiPoly
    den: MultiPoly

    @staticmethod
    def of(s: int, num: MultiPoly, den: MultiPoly | None = None) -> "MultiRational":
        if den is None:
            den = m_const(s, 1)
        num, den = m_strip(num), m_strip(den)
        if not den:
            raise DivisionByZero("zero denominator")
        c = gcd(m_content(num), m_content(den))
        if c > 1:
            num = {k: v // c for k, v in num.items()}
            den = {k: v // c for k, v in den.items()}
        return MultiRational(s, num, den)

    @staticmethod
    def constant(s: int, value) -> "MultiRational":
        f = Fraction(value)
        return MultiRational.of(s, m_const(s, f.numerator), m_const(s, f.denominator))

    @staticmethod
    def from_letter(s: int, letter: int) -> "MultiRational":
        """The probability variable of one letter, as a rational function."""
        return MultiRational.of(s, m_var(s, letter))

    @staticmethod
    def from_univariate(f: RationalFunction) -> "MultiRational":
        """Binary special case: substitute the p of a univariate target by
        the probability x_1 of the letter 1."""

        def lift(poly: IntPolynomial) -> MultiPoly:
            return m_strip({(0, i): c for i, c in enumerate(poly.coeffs)})

        return MultiRational.of(2, lift(f.num), lift(f.den))

    def __add__(self, other: "MultiRational") -> "MultiRational":
        return MultiRational.of(
            self.s,
            m_add(m_mul(self.num, other.den), m_mul(other.num, self.den)),
            m_mul(self.den, other.den),
        )

    def __neg__(self) -> "MultiRational":
        return MultiRational.of(self.s, m_neg(self.num), self.den)

    def __sub__(self, other: "MultiRational") -> "MultiRational":
        return self + (-other)

    def __mul__(self, other: "MultiRational") -> "MultiRational":
        return MultiRational.of(
            self.s, m_mul(self.num, other.num), m_mul(self.den, other.den)
        )

    def __truediv__(self, other: "MultiRational") -> "MultiRational":
        return MultiRational.of(
            self.s, m_mul(self.num, other.den), m_mul(self.den, other.num)
        )

    def __pow__(self, n: int) -> "MultiRational":
        result = MultiRational.constant(self.s, 1)
        for _ in range(n):
            result = result * self
        return result

    def eval(self, point) -> Fraction:
        return m_eval(self.num, point) / m_eval(self.den, point)

    def equals(self, other: "MultiRational") -> bool:
        return m_sub(
            m_mul(self.num, other.den), m_mul(other.num, self.den)
        ) == {}

    def equals_on_simplex(self, other: "MultiRational") -> bool:
        """Equality as functions of letter probabilities, which live on the
        simplex; formally distinct pairs can agree there."""
        if self.s != other.s:
            return False
        diff = m_sub(m_mul(self.num, other.den), m_mul(other.num, self.den))
        return m_simplex_substitute(diff, self.s) == {}

    def to_univariate(self) -> RationalFunction:
        """Binary special case: substitute x_1 = p, x_0 = 1 - p."""
        if self.s != 2:
            raise ValueError("only defined for two letters")

        def drop(poly: MultiPoly) -> IntPolynomial:
            from .ratfunc import ONE_POLY, P_POLY, ZERO_POLY

            q = IntPolynomial((1, -1))
            out = ZERO_POLY
            for (e0, e1), c in poly.items():
                out = out + c * (P_POLY**e1) * (q**e0)
            return out

        return RationalFunction.of(drop(self.num), drop(self.den))


def format_multi_poly(poly: MultiPoly, s: int) -> str:
    """Render with variables p1..ps (pK is the probability of letter K-1),
    parseable by the expression grammar."""
    poly = m_strip(poly)
    if not poly:
        return "0"
    parts: list[str] = []
    for key in sorted(poly, key=lambda k: (-sum(k), tuple(-e for e in k))):
        c = poly[key]
        factors = [
            f"p{j + 1}" if e == 1 else f"p{j + 1}^{e}"
            for j, e in enumerate(key)
            if e
        ]
        if abs(c) != 1 or not factors:
            factors.insert(0, str(abs(c)))
        body = "*".join(factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def format_multirational(f: MultiRational) -> str:
    """Render num/den; same parenthesization rules as the univariate form."""
    num = format_multi_poly(f.num, f.s)
    if f.den == m_const(f.s, 1):
        return num
    den = format_multi_poly(f.den, f.s)
    if " " in num:
        num = f"({num})"
    if not den.isdigit():
        den = f"({den})"
    return f"{num}/{den}"
