"""Expression language: exact lowering, error positions, and print/parse
round trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinfactory.errors import DivisionByZero, ExpressionError
from coinfactory.expr import parse_rational, parse_multirational
from coinfactory.multivar import (
    MultiRational,
    format_multirational,
    m_const,
    m_mul,
)
from coinfactory.ratfunc import RationalFunction, format_rational


def rf(num, den=(1,)):
    return RationalFunction.of(num, den)


class TestParseRational:
    def test_atoms(self):
        assert parse_rational("p") == RationalFunction.var()
        assert parse_rational("7") == rf((7,))
        assert parse_rational("0") == rf((0,))

    def test_arithmetic(self):
        assert parse_rational("1/2") == rf((1,), (2,))
        assert parse_rational("(1-p)/2") == rf((1, -1), (2,))
        assert parse_rational("2*p*(1-p)") == rf((0, 2, -2))
        assert parse_rational("p^2/(2*p^2 - 2*p + 1)") == rf((0, 0, 1), (1, -2, 2))
        assert parse_rational("p/(1+p)") == rf((0, 1), (1, 1))

    def test_precedence_and_power(self):
        assert parse_rational("1+2*3") == rf((7,))
        assert parse_rational("2^3") == rf((8,))
        assert parse_rational("2*p^2") == rf((0, 0, 2))
        assert parse_rational("(1+p)^2") == rf((1, 2, 1))

    def test_leading_minus(self):
        assert parse_rational("-p") == rf((0, -1))
        assert parse_rational("-p + 1") == rf((1, -1))
        assert parse_rational("(-p + 1)/2") == rf((1, -1), (2,))

    def test_whitespace_is_free(self):
        assert parse_rational(" ( 1 - p ) / 2 ") == rf((1, -1), (2,))

    def test_division_by_zero_constant(self):
        with pytest.raises(DivisionByZero):
            parse_rational("1/0")

    def test_division_by_vanishing_polynomial(self):
        with pytest.raises(DivisionByZero):
            parse_rational("1/(p-p)")


class TestParseErrors:
    def test_empty(self):
        with pytest.raises(ExpressionError):
            parse_rational("")
        with pytest.raises(ExpressionError):
            parse_rational("   ")

    def test_unexpected_character_position(self):
        with pytest.raises(ExpressionError) as info:
            parse_rational("p $ 2")
        assert info.value.position == 2

    def test_dangling_operator(self):
        with pytest.raises(ExpressionError) as info:
            parse_rational("p + ")
        assert info.value.position == 4

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ExpressionError):
            parse_rational("(1 + p")

    def test_trailing_input(self):
        with pytest.raises(ExpressionError) as info:
            parse_rational("p 2")
        assert info.value.position == 2

    def test_power_does_not_chain(self):
        with pytest.raises(ExpressionError):
            parse_rational("2^3^2")

    def test_power_needs_integer_exponent(self):
        with pytest.raises(ExpressionError):
            parse_rational("p^p")

    def test_indexed_variable_rejected_in_single_coin(self):
        with pytest.raises(ExpressionError):
            parse_rational("p1 + p2")


class TestParseMultiRational:
    def test_letters_sum(self):
        total = parse_multirational("p1 + p2 + p3", 3)
        assert total == sum(
            (MultiRational.from_letter(3, k) for k in range(1, 3)),
            MultiRational.from_letter(3, 0),
        )

    def test_plain_p_is_letter_one_when_binary(self):
        assert parse_multirational("p", 2) == parse_multirational("p2", 2)

    def test_plain_p_needs_binary_alphabet(self):
        with pytest.raises(ExpressionError):
            parse_multirational("p", 3)

    def test_index_out_of_range(self):
        with pytest.raises(ExpressionError):
            parse_multirational("p4", 3)
        with pytest.raises(ExpressionError):
            parse_multirational("p0", 3)

    def test_quotients(self):
        got = parse_multirational("p1/(p1 + p2)", 2)
        num = MultiRational.from_letter(2, 0)
        den = MultiRational.from_letter(2, 0) + MultiRational.from_letter(2, 1)
        assert got == num / den

    def test_constants_are_degree_zero(self):
        half = parse_multirational("1/2", 4)
        assert half == MultiRational.constant(4, 1) / MultiRational.constant(4, 2)


coefficients = st.integers(min_value=-6, max_value=6)
polys = st.lists(coefficients, min_size=1, max_size=5)
nonzero_polys = polys.filter(lambda cs: any(cs))


class TestRoundTrip:
    @settings(max_examples=150)
    @given(polys, nonzero_polys)
    def test_print_then_parse_is_identity(self, num, den):
        f = RationalFunction.of(tuple(num), tuple(den))
        assert parse_rational(format_rational(f)) == f

    @settings(max_examples=60)
    @given(
        st.integers(min_value=2, max_value=4),
        st.dictionaries(
            st.tuples(
                st.integers(min_value=0, max_value=2),
                st.integers(min_value=0, max_value=2),
            ),
            st.integers(min_value=-4, max_value=4).filter(bool),
            min_size=1,
            max_size=4,
        ),
    )
    def test_multirational_print_then_parse(self, s, exponents):
        num = {
            key + (0,) * (s - 2): value for key, value in exponents.items()
        }
        f = MultiRational.of(s, num)
        assert parse_multirational(format_multirational(f), s) == f

    def test_canonical_forms_survive(self):
        for text in ("p", "1/2", "p^2/(2*p^2 - 2*p + 1)", "(3*p^2 - 3*p + 1)/2"):
            f = parse_rational(text)
            assert format_rational(f) == text
