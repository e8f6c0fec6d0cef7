"""Exact polynomial and rational-function arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coinfactory.errors import CapExceeded, DivisionByZero, InvalidRange, PoleAtPoint
from coinfactory.ratfunc import (
    BernsteinPair,
    HomogeneousPoly,
    IntPolynomial,
    ONE_POLY,
    P_POLY,
    RationalFunction,
    ZERO_POLY,
    bernstein_from_rational,
    check_range,
    format_poly,
    format_rational,
    homogenize,
    poly_det,
    poly_divexact,
    poly_gcd,
    polya_exponent,
    signed_pair,
)

small_ints = st.integers(min_value=-9, max_value=9)
polys = st.lists(small_ints, min_size=0, max_size=6).map(IntPolynomial.of)
nonzero_polys = polys.filter(lambda f: not f.is_zero)


class TestIntPolynomial:
    def test_normalization_strips_trailing_zeros(self):
        assert IntPolynomial.of((1, 2, 0, 0)) == IntPolynomial.of((1, 2))
        assert IntPolynomial.of((0, 0)).is_zero

    def test_degree_conventions(self):
        assert ZERO_POLY.degree == -1
        assert ONE_POLY.degree == 0
        assert P_POLY.degree == 1
        assert ZERO_POLY.leading == 0

    def test_eval_is_exact(self):
        f = IntPolynomial.of((1, -3, 3))
        assert f.eval(Fraction(1, 3)) == Fraction(1, 3)

    @given(polys, polys, st.fractions(min_value=-2, max_value=2))
    def test_product_evaluates_pointwise(self, a, b, x):
        assert (a * b).eval(x) == a.eval(x) * b.eval(x)

    @given(polys, polys, st.fractions(min_value=-2, max_value=2))
    def test_sum_evaluates_pointwise(self, a, b, x):
        assert (a + b).eval(x) == a.eval(x) + b.eval(x)

    @given(polys, nonzero_polys)
    def test_divexact_inverts_multiplication(self, a, b):
        assert poly_divexact(a * b, b) == a

    def test_divexact_rejects_inexact(self):
        with pytest.raises(ValueError):
            poly_divexact(IntPolynomial.of((1, 1)), IntPolynomial.of((0, 1)))

    def test_divexact_rejects_zero_divisor(self):
        with pytest.raises(DivisionByZero):
            poly_divexact(ONE_POLY, ZERO_POLY)

    @given(nonzero_polys, nonzero_polys, nonzero_polys)
    def test_gcd_divides_common_multiple(self, g, a, b):
        d = poly_gcd(a * g, b * g)
        # g divides both products, so it divides their gcd
        poly_divexact(d, poly_gcd(d, g))  # no exception: gcd(d, g) divides d
        assert poly_divexact(a * g, d) * d == a * g

    def test_gcd_is_primitive_with_positive_leading(self):
        d = poly_gcd(IntPolynomial.of((-2, -2)), IntPolynomial.of((0, -4, -4)))
        assert d == IntPolynomial.of((1, 1))


class TestPolyDet:
    def test_two_by_two(self):
        a = IntPolynomial.of((0, 1))
        det = poly_det([[a, ONE_POLY], [ONE_POLY, a]])
        assert det == IntPolynomial.of((-1, 0, 1))

    def test_singular_matrix(self):
        row = [ONE_POLY, P_POLY]
        assert poly_det([row, list(row)]).is_zero

    def test_empty_matrix_is_one(self):
        assert poly_det([]) == ONE_POLY

    @given(st.lists(st.lists(small_ints, min_size=3, max_size=3),
                    min_size=3, max_size=3))
    def test_matches_fraction_elimination(self, entries):
        mat = [[IntPolynomial.of((c,)) for c in row] for row in entries]
        det = poly_det(mat)
        # constant matrices: compare against direct cofactor expansion
        (a, b, c), (d, e, f), (g, h, i) = entries
        expected = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
        assert det == IntPolynomial.of((expected,))


class TestRationalFunction:
    def test_canonical_reduction(self):
        f = RationalFunction.of((0, 2), (2, 2))
        assert f == RationalFunction.of((0, 1), (1, 1))

    def test_canonical_sign(self):
        f = RationalFunction.of((1,), (-2, -2))
        assert f.den.leading > 0
        assert f == RationalFunction.of((-1,), (2, 2))

    def test_zero_numerator_normalizes_denominator(self):
        assert RationalFunction.of((0,), (5, 3)) == RationalFunction.of((0,))

    def test_zero_denominator_rejected(self):
        with pytest.raises(DivisionByZero):
            RationalFunction.of((1,), (0,))

    def test_pole_detection(self):
        f = RationalFunction.of((1,), (0, 1))
        with pytest.raises(PoleAtPoint):
            f.eval(0)
        assert f.eval(Fraction(1, 2)) == 2

    @given(polys, nonzero_polys, polys, nonzero_polys)
    def test_field_identities(self, an, ad, bn, bd):
        a = RationalFunction.of(an, ad)
        b = RationalFunction.of(bn, bd)
        assert a + b == b + a
        assert a - a == RationalFunction.of((0,))
        assert a * b == b * a
        if not b.num.is_zero:
            assert (a / b) * b == a

    @given(polys, nonzero_polys)
    def test_canonical_form_is_unique(self, n, d):
        f = RationalFunction.of(n, d)
        g = RationalFunction.of(f.num * IntPolynomial.of((3, 3)),
                                f.den * IntPolynomial.of((3, 3)))
        assert f == g


class TestFormatting:
    def test_poly_rendering(self):
        assert format_poly(IntPolynomial.of((1, -2, 2))) == "2*p^2 - 2*p + 1"
        assert format_poly(ZERO_POLY) == "0"
        assert format_poly(IntPolynomial.of((0, -1))) == "-p"

    def test_rational_rendering(self):
        f = RationalFunction.of((0, 0, 1), (1, -2, 2))
        assert format_rational(f) == "p^2/(2*p^2 - 2*p + 1)"
        assert format_rational(RationalFunction.of((1,), (2,))) == "1/2"
        assert str(f) == format_rational(f)


class TestHomogenize:
    def test_signed_pair_flips_negative_denominator(self):
        f = RationalFunction.of((-1,), (-2, 1))  # 1/(2 - p) after sign fix
        num, den = signed_pair(f)
        assert den.eval(Fraction(1, 2)) > 0
        assert num == IntPolynomial.of((1,))

    def test_lifts_to_common_degree(self):
        f = RationalFunction.of((1,), (3,))
        num_h, den_h = homogenize(f)
        assert num_h.degree == den_h.degree == 0
        f = RationalFunction.of((0, 1), (2,))  # p/2
        num_h, den_h = homogenize(f)
        assert num_h.coeffs == (0, 1)
        assert den_h.coeffs == (2, 2)

    @given(polys, nonzero_polys, st.fractions(min_value=0, max_value=1))
    def test_dehomogenize_inverts(self, n, d, x):
        f = RationalFunction.of(n, d)
        if f.den.eval(Fraction(1, 2)) == 0:
            return
        num_h, den_h = homogenize(f)
        assert RationalFunction.of(
            num_h.dehomogenize(), den_h.dehomogenize()
        ) == f

    @given(st.lists(small_ints, min_size=1, max_size=5), st.integers(0, 4))
    def test_pascal_shift_is_simplex_multiplication(self, coeffs, n):
        h = HomogeneousPoly(len(coeffs) - 1, tuple(coeffs))
        shifted = h.pascal_shift(n)
        assert shifted.degree == h.degree + n
        p = Fraction(2, 7)
        direct = sum(
            c * p**i * (1 - p) ** (h.degree - i) for i, c in enumerate(h.coeffs)
        )
        lifted = sum(
            c * p**i * (1 - p) ** (shifted.degree - i)
            for i, c in enumerate(shifted.coeffs)
        )
        assert lifted == direct  # (p + q)^n = 1 on the simplex


class TestPolya:
    def test_known_exponent(self):
        h = HomogeneousPoly(2, (1, -1, 1))
        assert polya_exponent([h]) == 1
        assert h.pascal_shift(1).coeffs == (1, 0, 0, 1)

    def test_already_nonnegative(self):
        assert polya_exponent([HomogeneousPoly(1, (1, 2))]) == 0

    def test_cap_exhaustion(self):
        # negative on the simplex: no shift can ever fix it
        h = HomogeneousPoly(0, (-1,))
        with pytest.raises(CapExceeded):
            polya_exponent([h], cap=5)


class TestRangeCheck:
    def test_accepts_interior_functions(self):
        check_range(RationalFunction.of((1,), (3,)))
        check_range(RationalFunction.of((0, 0, 1), (1, -2, 2)))

    def test_rejects_exceeding_one(self):
        with pytest.raises(InvalidRange):
            check_range(RationalFunction.of((0, 2)))  # 2p

    def test_rejects_affine_shift(self):
        with pytest.raises(InvalidRange):
            check_range(RationalFunction.of((1, 1)))  # 1 + p

    def test_rejects_interior_pole(self):
        with pytest.raises(InvalidRange):
            check_range(RationalFunction.of((1,), (-1, 2)))  # pole at 1/2


class TestBernstein:
    def test_constant_third(self):
        bp = bernstein_from_rational(RationalFunction.of((1,), (3,)))
        assert bp.d == (1,)
        assert bp.e == (3,)
        assert bp.polya_exponent == 0

    def test_square(self):
        bp = bernstein_from_rational(RationalFunction.of((0, 0, 1)))
        assert bp.degree == 2
        assert bp.d == (0, 0, 1)
        assert bp.e == (1, 2, 1)

    def test_thresholds_ordered(self):
        f = RationalFunction.of((1, -3, 3), (2,))
        bp = bernstein_from_rational(f)
        assert all(0 <= di <= ei for di, ei in zip(bp.d, bp.e))
        assert bp.as_rational() == f

    def test_invalid_thresholds_rejected(self):
        with pytest.raises(ValueError):
            BernsteinPair(1, (2, 0), (1, 1), 0)

    @given(st.integers(1, 5), st.integers(2, 7))
    def test_reconstructs_simple_fractions(self, a, b):
        if not a < b:
            return
        f = RationalFunction.of((a,), (b,))
        bp = bernstein_from_rational(f)
        assert bp.as_rational() == f
