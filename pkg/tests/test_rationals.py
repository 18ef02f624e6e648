"""Rational substrate: bit-length measure, literals, vector helpers."""

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnnbits.rationals import (
    DimensionMismatch,
    as_rat,
    as_vec,
    bitlen_int,
    bitlen_rat,
    bitlen_vec,
    check_dim,
    format_rat,
    format_vec,
    parse_rat,
    rat_arith,
    rat_compare,
)

rats = st.fractions(
    min_value=F(-(10**9)), max_value=F(10**9), max_denominator=10**9
)


class TestBitlen:
    def test_integer_bits(self):
        assert bitlen_int(0) == 1
        assert bitlen_int(1) == 1
        assert bitlen_int(2) == 2
        assert bitlen_int(255) == 8
        assert bitlen_int(256) == 9

    def test_frozen_scalar_values(self):
        assert bitlen_rat(F(0)) == 2
        assert bitlen_rat(F(1)) == 2
        assert bitlen_rat(F(5)) == 4
        assert bitlen_rat(F(-5)) == 4
        assert bitlen_rat(F(3, 2)) == 4

    def test_frozen_vector_values(self):
        assert bitlen_vec((F(1), F(1))) == 4
        assert bitlen_vec((F(0),)) == 2
        assert bitlen_vec((F(3, 2), F(5))) == 8

    def test_zero_vector_is_2d(self):
        for d in range(1, 6):
            assert bitlen_vec((F(0),) * d) == 2 * d

    def test_measured_in_lowest_terms(self):
        # 6/4 reduces to 3/2 before measuring
        assert bitlen_rat(F(6, 4)) == bitlen_rat(F(3, 2)) == 4

    @given(rats)
    def test_sign_invariance(self, q):
        assert bitlen_rat(q) == bitlen_rat(-q)

    @given(rats)
    def test_minimum_is_two(self, q):
        assert bitlen_rat(q) >= 2

    @given(rats)
    def test_matches_definition(self, q):
        assert bitlen_rat(q) == bitlen_int(abs(q.numerator)) + bitlen_int(q.denominator)

    @given(st.lists(rats, min_size=0, max_size=5))
    def test_vector_is_sum_of_entries(self, entries):
        vec = tuple(entries)
        assert bitlen_vec(vec) == sum(bitlen_rat(q) for q in vec)

    @given(rats, rats)
    def test_product_subadditive(self, a, b):
        # the inequality the composed envelope bound relies on
        assert bitlen_rat(a * b) <= bitlen_rat(a) + bitlen_rat(b)


class TestLiterals:
    def test_formats(self):
        assert format_rat(F(5)) == "5"
        assert format_rat(F(0)) == "0"
        assert format_rat(F(3, 2)) == "3/2"
        assert format_rat(F(-3, 2)) == "-3/2"

    def test_parse_reduces(self):
        assert parse_rat("6/4") == F(3, 2)
        assert parse_rat("-6/4") == F(-3, 2)

    @given(rats)
    def test_round_trip(self, q):
        assert parse_rat(format_rat(q)) == q

    @pytest.mark.parametrize(
        "bad", ["", "1/0", "1.5", "a", "1/-2", " 1", "1 /2", "+1", "1/2/3", "0x1"]
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            parse_rat(bad)

    def test_format_vec(self):
        assert list(format_vec((F(1), F(3, 2)))) == ["1", "3/2"]


class TestArith:
    @given(rats, rats)
    def test_compare_total_order(self, a, b):
        c = rat_compare(a, b)
        assert c in (-1, 0, 1)
        assert (c == 0) == (a == b)
        assert (c < 0) == (a < b)

    def test_dispatch(self):
        assert rat_arith("add", F(1, 2), F(1, 3)) == F(5, 6)
        assert rat_arith("mul", F(2, 3), F(3, 2)) == F(1)
        assert rat_arith("neg", F(2)) == F(-2)
        assert rat_arith("max", F(1), F(3)) == F(3)
        assert rat_arith("compare", F(1), F(3)) == -1

    def test_unknown_operation(self):
        with pytest.raises(ValueError):
            rat_arith("div", F(1), F(2))

    @given(rats, rats)
    def test_exactness(self, a, b):
        # lowest terms and positive denominator always hold after arithmetic
        s = rat_arith("add", a, b)
        from math import gcd

        assert s.denominator >= 1
        assert gcd(abs(s.numerator), s.denominator) == 1


class TestHelpers:
    def test_as_rat(self):
        assert as_rat(3) == F(3)
        assert as_rat("3/2") == F(3, 2)
        assert as_rat(F(1, 4)) == F(1, 4)

    def test_as_vec(self):
        assert as_vec([1, "3/2"]) == (F(1), F(3, 2))

    def test_check_dim(self):
        check_dim((F(1), F(2)), 2)
        with pytest.raises(DimensionMismatch):
            check_dim((F(1),), 2)
