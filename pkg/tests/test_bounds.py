from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from omegalab.bounds import greedy_coefficients, lower_bound_report, truncate, truncated_sums
from omegalab.dyadic import ZERO, Dyadic
from omegalab.usefn import Signature
from oracles import floor_truncate, sums_oracle

SIG = Signature(((1, 1, 1), (2, 2, 3), (3, 4, 5)))


@st.composite
def signatures(draw):
    n = draw(st.integers(1, 6))
    cs = sorted(draw(st.lists(st.integers(0, 16), min_size=n, max_size=n, unique=True)))
    return Signature.from_runs([(c, draw(st.integers(1, 8))) for c in cs])


class TestTruncate:
    def test_examples(self):
        assert greedy_coefficients(Dyadic(5, 3), (1, 3)) == [1, 1]
        assert truncate(Dyadic(5, 3), 0, (1, 3)) == Dyadic(1, 1)
        assert truncate(ZERO, 1, (1, 3)) == ZERO
        assert truncate(Dyadic(1, 3), 0, (2, 3)) == ZERO

    def test_bad_index(self):
        with pytest.raises(IndexError):
            truncate(Dyadic(1, 3), 2, (1, 3))

    @given(st.integers(0, 1 << 30), st.integers(0, 30),
           st.lists(st.integers(0, 20), min_size=1, max_size=5, unique=True), st.data())
    def test_equals_floor(self, m, s, cs, data):
        cs = sorted(cs)
        t = data.draw(st.integers(0, len(cs) - 1))
        x = Dyadic(m, s)
        assert truncate(x, t, cs).to_fraction() == floor_truncate(x.to_fraction(), cs[t])


class TestTruncatedSums:
    def test_example(self):
        s = truncated_sums(SIG, 2)
        assert s[0] == Dyadic(1, 2) and s[1] == Dyadic(1, 1)
        assert s[-1] == ZERO
        with pytest.raises(IndexError):
            s[2]

    def test_small_top_term_vanishes(self):
        sig = Signature(((1, 1, 1), (4, 2, 2)))
        assert truncated_sums(sig, 1)[0] == ZERO

    @settings(max_examples=150)
    @given(signatures(), st.data())
    def test_matches_oracle(self, sig, data):
        k = data.draw(st.integers(0, len(sig) - 1))
        got = [v.to_fraction() for v in truncated_sums(sig, k).values]
        assert got == sums_oracle(sig.entries, k)


class TestLowerBound:
    def test_example(self):
        rep = lower_bound_report(SIG, 2, 1)
        assert rep.holds
        assert rep.truncated == Dyadic(1, 1)
        assert rep.raw_sum == Dyadic(3, 2)
        assert rep.slack == Dyadic(3, 2)

    def test_t_zero(self):
        assert lower_bound_report(SIG, 2, 0).holds

    @settings(max_examples=200)
    @given(signatures())
    def test_never_violated(self, sig):
        for k in range(len(sig)):
            sums = sums_oracle(sig.entries, k)
            for t in range(k):
                rep = lower_bound_report(sig, k, t)
                raw = sum(Fraction(sig.size(k - i), 2 ** sig.constant(k - i)) for i in range(t + 1))
                assert rep.raw_sum.to_fraction() == raw
                assert rep.holds and sums[t] >= raw - 1
