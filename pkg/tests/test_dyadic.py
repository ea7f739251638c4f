from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from omegalab.dyadic import (
    INTEGER_PART,
    ONE,
    ZERO,
    Dyadic,
    bits,
    first_digit_difference,
    leftmost_change,
    least_increment,
    prefix,
)
from oracles import frac_prefix

dyadics = st.builds(Dyadic, st.integers(0, 1 << 40), st.integers(0, 48))


def D(text):
    return Dyadic.parse(text)


class TestCanonicalForm:
    def test_zero_has_scale_zero(self):
        assert Dyadic(0, 17).scale == 0

    def test_even_mantissa_reduced(self):
        x = Dyadic(12, 5)
        assert (x.mantissa, x.scale) == (3, 3)

    def test_negative_scale_shifts_up(self):
        assert Dyadic(3, -2) == Dyadic(12)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Dyadic(-1, 0)

    def test_rejects_bool_and_float(self):
        with pytest.raises(TypeError):
            Dyadic(True)
        with pytest.raises(TypeError):
            Dyadic(1.5)

    def test_immutable(self):
        with pytest.raises(AttributeError):
            ONE.mantissa = 2

    @given(dyadics)
    def test_canonical_invariant(self, x):
        assert (x.mantissa == 0 and x.scale == 0) or x.mantissa % 2 == 1 or x.scale == 0


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("3", Fraction(3)), ("5/2^3", Fraction(5, 8)), ("3/4", Fraction(3, 4)),
        ("0.101", Fraction(5, 8)), ("1.1", Fraction(3, 2)), ("0x10/2^4", Fraction(1)),
    ])
    def test_forms(self, text, value):
        assert D(text).to_fraction() == value

    def test_non_dyadic_denominator(self):
        with pytest.raises(ValueError):
            D("1/3")

    @given(dyadics)
    def test_str_roundtrip(self, x):
        assert D(str(x)) == x

    def test_huge_mantissa_prints_hex_and_roundtrips(self):
        x = Dyadic((1 << 20000) + 1, 20001)
        assert str(x).startswith("0x")
        assert D(str(x)) == x


class TestArithmetic:
    def test_examples(self):
        assert ZERO + D("5/8") == D("5/8")
        assert D("1/2") + D("1/4") == D("3/4")
        assert D("3/4") + D("1/4") == ONE

    @given(dyadics, dyadics)
    def test_add_matches_fractions(self, a, b):
        assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()

    @given(dyadics, dyadics)
    def test_sub_and_order(self, a, b):
        lo, hi = sorted([a, b], key=Dyadic.to_fraction)
        assert (hi - lo).to_fraction() == hi.to_fraction() - lo.to_fraction()
        assert (a < b) == (a.to_fraction() < b.to_fraction())
        assert (a == b) == (a.to_fraction() == b.to_fraction())

    def test_negative_difference_rejected(self):
        with pytest.raises(ValueError):
            D("1/4") - D("1/2")

    @given(dyadics, st.integers(-30, 30))
    def test_shift(self, x, k):
        assert x.shift(k).to_fraction() == x.to_fraction() * Fraction(2) ** k

    def test_binary(self):
        assert D("5/8").binary() == "0.101"
        assert D("3/2").binary(3) == "1.100"


class TestPrefix:
    def test_examples(self):
        assert prefix(D("5/8"), 2) == 2
        assert prefix(D("11/4"), 0) == 2
        assert prefix(ZERO, 9) == 0

    @given(dyadics, st.integers(0, 60))
    def test_matches_floor(self, x, m):
        assert prefix(x, m) == frac_prefix(x.to_fraction(), m)

    def test_bits_drop_integer_part(self):
        assert bits(D("13/8"), 3) == "101"


class TestLeftmostChange:
    def test_examples(self):
        assert leftmost_change(D("5/8"), D("3/4")) == 2
        assert leftmost_change(D("1/2"), D("1/2") + Dyadic(1, 9)) == 9

    def test_equal_rejected(self):
        with pytest.raises(ValueError):
            leftmost_change(ONE, ONE)

    def test_integer_part(self):
        assert leftmost_change(D("3/4"), ONE) == INTEGER_PART

    @given(dyadics, dyadics)
    def test_first_differing_prefix(self, a, b):
        if a == b or a.floor() != b.floor():
            return
        fa, fb = a.to_fraction(), b.to_fraction()
        want = next(m for m in range(1, 100) if frac_prefix(fa, m) != frac_prefix(fb, m))
        assert leftmost_change(a, b) == want


class TestLeastIncrement:
    def test_examples(self):
        assert least_increment(ZERO, 3) == Dyadic(1, 3)
        assert least_increment(D("5/8"), 2) == Dyadic(1, 3)
        assert least_increment(D("3/4"), 2) == D("1/4")

    @given(dyadics, st.integers(1, 50))
    def test_minimal_change(self, x, m):
        d = least_increment(x, m)
        assert prefix(x + d, m) != prefix(x, m)
        # one unit at the finest scale less would not do
        unit = Dyadic(1, max(m, x.scale, d.scale))
        if d > unit:
            assert prefix(x + (d - unit), m) == prefix(x, m)

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            least_increment(ONE, 0)


class TestFirstDigitDifference:
    @given(dyadics, dyadics, st.integers(1, 40), st.integers(0, 40))
    def test_matches_scan(self, a, b, lo, width):
        hi = lo + width
        fa, fb = a.to_fraction(), b.to_fraction()
        want = next((i for i in range(lo, hi + 1)
                     if frac_prefix(fa, i) % 2 != frac_prefix(fb, i) % 2), None)
        assert first_digit_difference(a, b, lo, hi) == want

    def test_huge_horizon_is_cheap(self):
        assert first_digit_difference(D("1/2"), D("1/4"), 1, 1 << 200) == 1
        assert first_digit_difference(D("1/2"), D("1/2"), 1, 1 << 200) is None
