"""Exact arithmetic for the rational targets a coin machine can realize.

Polynomials carry arbitrary-precision integer coefficients in ascending
order of the variable p, with no trailing zeros (the zero polynomial is the
empty coefficient list).  Rational functions are kept in a unique canonical
form: numerator and denominator coprime over Q[p], joint integer content 1,
and positive leading denominator coefficient.

The second half of the module rewrites a target f = num/den as a ratio of
polynomials with nonnegative coefficients in the two-variable basis
p^i q^(k-i), q standing for 1-p.  Multiplying repeatedly by (p + q) (a
Pascal-triangle shift of the coefficient vector) eventually clears negative
coefficients whenever the polynomial is positive on the open segment; the
smallest exponent that works is found by search up to a cap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .errors import CapExceeded, DivisionByZero, InvalidRange, PoleAtPoint

# Exact scalars are plain stdlib fractions.
BigRational = Fraction


def _strip(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return coeffs[:n]


@dataclass(frozen=True)
class IntPolynomial:
    """Integer-coefficient polynomial in p, ascending coefficients."""

    coeffs: tuple[int, ...]

    @staticmethod
    def of(coeffs) -> "IntPolynomial":
        cs = tuple(int(c) for c in coeffs)
        return IntPolynomial(_strip(cs))

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("trailing zero coefficient")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def content(self) -> int:
        """Nonnegative gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(_strip(tuple(out)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            if other == 0:
                return ZERO_POLY
            return IntPolynomial(tuple(other * c for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZERO_POLY
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "IntPolynomial":
        if n < 0:
            raise ValueError("negative exponent")
        result = ONE_POLY
        for _ in range(n):
            result = result * self
        return result

    def eval(self, x) -> Fraction:
        """Exact Horner evaluation at a rational point."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


ZERO_POLY = IntPolynomial(())
ONE_POLY = IntPolynomial((1,))
P_POLY = IntPolynomial((0, 1))


def poly_divexact(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Divide a by b, requiring the division to be exact over Z[p]."""
    if b.is_zero:
        raise DivisionByZero("division by the zero polynomial")
    if a.is_zero:
        return ZERO_POLY
    rem = [Fraction(c) for c in a.coeffs]
    div = [Fraction(c) for c in b.coeffs]
    dq = len(rem) - len(div)
    if dq < 0:
        raise ValueError("division is not exact")
    quot = [Fraction(0)] * (dq + 1)
    for k in range(dq, -1, -1):
        c = rem[k + len(div) - 1] / div[-1]
        quot[k] = c
        for i, dcoef in enumerate(div):
            rem[k + i] -= c * dcoef
    if any(rem):
        raise ValueError("division is not exact")
    if any(c.denominator != 1 for c in quot):
        raise ValueError("quotient is not integral")
    return IntPolynomial.of(int(c) for c in quot)


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd in Z[p] with positive leading coefficient."""
    fa = [Fraction(c) for c in a.coeffs]
    fb = [Fraction(c) for c in b.coeffs]
    while fb:
        # polynomial remainder of fa by fb over Q
        while len(fa) >= len(fb) and fa:
            c = fa[-1] / fb[-1]
            off = len(fa) - len(fb)
            for i in range(len(fb)):
                fa[off + i] -= c * fb[i]
            while fa and fa[-1] == 0:
                fa.pop()
        fa, fb = fb, fa
    if not fa:
        return ZERO_POLY
    denom_lcm = 1
    for c in fa:
        denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in fa]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return IntPolynomial(tuple(ints))


def poly_det(rows: list[list[IntPolynomial]]) -> IntPolynomial:
    """Determinant of a square polynomial matrix.

    Fraction-free Gaussian elimination: every intermediate division is exact
    over Z[p], so no rational coefficients ever appear.
    """
    n = len(rows)
    if n == 0:
        return ONE_POLY
    m = [list(row) for row in rows]
    sign = 1
    prev = ONE_POLY
    for k in range(n - 1):
        pivot_row = next((i for i in range(k, n) if not m[i][k].is_zero), None)
        if pivot_row is None:
            return ZERO_POLY
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = poly_divexact(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev)
            m[i][k] = ZERO_POLY
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


@dataclass(frozen=True)
class RationalFunction:
    """Ratio of integer polynomials in canonical form."""

    num: IntPolynomial
    den: IntPolynomial

    @staticmethod
    def of(num, den=(1,)) -> "RationalFunction":
        n = num if isinstance(num, IntPolynomial) else IntPolynomial.of(num)
        d = den if isinstance(den, IntPolynomial) else IntPolynomial.of(den)
        if d.is_zero:
            raise DivisionByZero("zero denominator")
        if n.is_zero:
            return RationalFunction(ZERO_POLY, ONE_POLY)
        g = poly_gcd(n, d)
        n = poly_divexact(n, g)
        d = poly_divexact(d, g)
        c = gcd(n.content(), d.content())
        if c > 1:
            n = IntPolynomial(tuple(x // c for x in n.coeffs))
            d = IntPolynomial(tuple(x // c for x in d.coeffs))
        if d.leading < 0:
            n, d = -n, -d
        return RationalFunction(n, d)

    @staticmethod
    def from_fraction(x) -> "RationalFunction":
        f = Fraction(x)
        return RationalFunction.of((f.numerator,), (f.denominator,))

    @staticmethod
    def var() -> "RationalFunction":
        """The identity target p."""
        return RationalFunction(P_POLY, ONE_POLY)

    def eval(self, x) -> Fraction:
        dv = self.den.eval(x)
        if dv == 0:
            raise PoleAtPoint(f"denominator vanishes at {x}")
        return self.num.eval(x) / dv

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.of(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.of(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.of(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.num.is_zero:
            raise DivisionByZero("division by the zero function")
        return RationalFunction.of(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "RationalFunction":
        result = RF_ONE
        for _ in range(n):
            result = result * self
        return result

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree <= 0

    def __str__(self) -> str:
        return format_rational(self)


RF_ZERO = RationalFunction(ZERO_POLY, ONE_POLY)
RF_ONE = RationalFunction(ONE_POLY, ONE_POLY)


def format_poly(poly: IntPolynomial, var: str = "p") -> str:
    """Render with descending powers, parseable by the expression grammar."""
    if poly.is_zero:
        return "0"
    parts: list[str] = []
    for i in range(poly.degree, -1, -1):
        c = poly.coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            head = var if i == 1 else f"{var}^{i}"
            body = head if mag == 1 else f"{mag}*{head}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def format_rational(f: "RationalFunction", var: str = "p") -> str:
    """Render f so parsing the result reproduces the same canonical form.

    Multi-term sides are parenthesized because '/' binds to a single
    factor; a denominator of one is omitted.
    """
    num = format_poly(f.num, var)
    if f.den == ONE_POLY:
        return num
    den = format_poly(f.den, var)
    if " " in num:
        num = f"({num})"
    if not re.fullmatch(rf"\d+|{var}(\^\d+)?", den):
        den = f"({den})"
    return f"{num}/{den}"


@dataclass(frozen=True)
class HomogeneousPoly:
    """Homogeneous polynomial in (p, q); entry i is the p^i q^(k-i) coefficient."""

    degree: int
    coeffs: tuple[int, ...]

    @staticmethod
    def of(degree: int, coeffs) -> "HomogeneousPoly":
        cs = tuple(int(c) for c in coeffs)
        if len(cs) != degree + 1:
            raise ValueError("coefficient count must be degree + 1")
        return HomogeneousPoly(degree, cs)

    @property
    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def pascal_shift(self, n: int = 1) -> "HomogeneousPoly":
        """Multiply by (p + q)^n: n Pascal-triangle passes over the vector."""
        cs = list(self.coeffs)
        for _ in range(n):
            cs = [
                (cs[i] if i < len(cs) else 0) + (cs[i - 1] if i > 0 else 0)
                for i in range(len(cs) + 1)
            ]
        return HomogeneousPoly(self.degree + n, tuple(cs))

    def __sub__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return HomogeneousPoly(
            self.degree, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def dehomogenize(self) -> IntPolynomial:
        """Substitute q = 1 - p."""
        out = ZERO_POLY
        one_minus_p = IntPolynomial((1, -1))
        for i, c in enumerate(self.coeffs):
            if c:
                out = out + c * (P_POLY**i) * (one_minus_p ** (self.degree - i))
        return out


def signed_pair(f: RationalFunction) -> tuple[IntPolynomial, IntPolynomial]:
    """Representative (num, den) of f with den positive at p = 1/2.

    Canonical form fixes the sign of the leading denominator coefficient,
    which still allows both polynomials to be negative on (0, 1); the
    positivization below needs the representative that is positive there.
    """
    dv = f.den.eval(Fraction(1, 2))
    if dv == 0:
        raise InvalidRange("denominator vanishes at p = 1/2")
    if dv < 0:
        return -f.num, -f.den
    return f.num, f.den


def homogenize(f: RationalFunction) -> tuple[HomogeneousPoly, HomogeneousPoly]:
    """Rewrite num and den as degree-k homogeneous polynomials in (p, q).

    k is the larger of the two degrees; each monomial a_i p^i is padded to
    a_i p^i (p+q)^(k-i).  Substituting q = 1 - p recovers the originals (up
    to the joint sign fixed by signed_pair).
    """
    num, den = signed_pair(f)
    k = max(num.degree, den.degree, 0)

    def lift(poly: IntPolynomial) -> HomogeneousPoly:
        out = [0] * (k + 1)
        for i, a in enumerate(poly.coeffs):
            if a:
                # a * p^i * (p+q)^(k-i) spreads over p^(i+j) q^(k-i-j)
                for j in range(k - i + 1):
                    out[i + j] += a * comb(k - i, j)
        return HomogeneousPoly(k, tuple(out))

    return lift(num), lift(den)


def polya_exponent(polys, cap: int = 200) -> int:
    """Smallest n <= cap such that every polynomial, multiplied by (p+q)^n,
    has only nonnegative coefficients."""
    current = list(polys)
    for n in range(cap + 1):
        if all(h.is_nonnegative for h in current):
            return n
        current = [h.pascal_shift() for h in current]
    raise CapExceeded(cap, f"no nonnegative representation within exponent {cap}")


@dataclass(frozen=True)
class BernsteinPair:
    """Nonnegative threshold vectors certifying f = sum(d) / sum(e) in the
    basis p^i q^(k-i), with 0 <= d_i <= e_i throughout."""

    degree: int
    d: tuple[int, ...]
    e: tuple[int, ...]
    polya_exponent: int

    def __post_init__(self):
        if len(self.d) != self.degree + 1 or len(self.e) != self.degree + 1:
            raise ValueError("threshold vectors must have degree + 1 entries")
        for di, ei in zip(self.d, self.e):
            if not 0 <= di <= ei:
                raise ValueError("thresholds must satisfy 0 <= d_i <= e_i")

    def numerator(self) -> IntPolynomial:
        return HomogeneousPoly(self.degree, self.d).dehomogenize()

    def denominator(self) -> IntPolynomial:
        return HomogeneousPoly(self.degree, self.e).dehomogenize()

    def as_rational(self) -> RationalFunction:
        return RationalFunction.of(self.numerator(), self.denominator())


GRID_POINTS = tuple(Fraction(j, 100) for j in range(1, 100))


def check_range(f: RationalFunction) -> None:
    """Exact grid screen: f must stay inside (0, 1) at every j/100."""
    for x in GRID_POINTS:
        dv = f.den.eval(x)
        if dv == 0:
            raise InvalidRange(f"denominator vanishes at p = {x}")
        v = f.num.eval(x) / dv
        if not 0 < v < 1:
            raise InvalidRange(f"f({x}) = {v} lies outside (0, 1)")


def bernstein_from_rational(f: RationalFunction, cap: int = 200) -> BernsteinPair:
    """Certify f as a ratio of nonnegative threshold vectors.

    The grid screen rejects visible range violations; the joint exponent
    then positivizes numerator, denominator, and their difference at the
    same degree, which keeps d_i <= e_i entrywise.  A cap exhaustion means
    either a subtle range violation or a genuinely hard certificate; the
    two are reported as they were detected, without claiming to tell them
    apart.
    """
    check_range(f)
    num_h, den_h = homogenize(f)
    gap_h = den_h - num_h
    n = polya_exponent([num_h, gap_h, den_h], cap)
    d = num_h.pascal_shift(n) if n else num_h
    e = den_h.pascal_shift(n) if n else den_h
    return BernsteinPair(d.degree, d.coeffs, e.coeffs, n)
