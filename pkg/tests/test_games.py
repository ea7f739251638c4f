import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from omegalab.corpus import general_cases
from omegalab.dyadic import ONE, ZERO, Dyadic
from omegalab.games import (
    DemandError,
    accumulation_check,
    compare_strategies,
    false_bound,
    false_bound_search,
    general_check,
    hload,
    hload_final,
    least_effort,
    offset_use,
    padded_responder,
    predict_atomic,
    predict_general,
    random_over_responder,
    table_use,
)
from omegalab.usefn import Signature
from oracles import naive_hload

SIG = Signature(((1, 1, 1), (2, 2, 3), (3, 4, 5)))


@st.composite
def small_signatures(draw):
    n = draw(st.integers(1, 4))
    cs = sorted(draw(st.lists(st.integers(0, 8), min_size=n, max_size=n, unique=True)))
    return Signature.from_runs([(c, draw(st.integers(1, 3))) for c in cs])


class TestHload:
    def test_atomic_examples(self):
        assert hload(offset_use(2), (1, 3)).final.gamma == Dyadic(1, 2)
        assert hload(offset_use(1), (0, 1)).final.gamma == Dyadic(1, 1)

    def test_stage_count_and_players(self):
        tr = hload(offset_use(0), (2, 5))
        assert tr.final.step == 2 * (2**3 - 1)
        assert [s.mover for s in tr.steps[:4]] == ["alpha", "beta", "alpha", "beta"]
        assert tr.final.alpha == tr.final.beta == Dyadic(7, 5)

    def test_general_example(self):
        gamma = hload(table_use(SIG), (1, 5)).final.gamma
        constraint, floor = predict_general(SIG, 2, 1, 1)
        assert (constraint, floor) == (Dyadic(3, 2), Dyadic(1, 2))
        assert gamma == Dyadic(3, 3)
        assert gamma >= floor

    def test_use_must_dominate_identity(self):
        with pytest.raises(ValueError):
            hload(lambda x: x - 1, (0, 2))

    def test_illegal_response(self):
        with pytest.raises(DemandError):
            hload(offset_use(1), (0, 2), strategy=lambda g, d: ZERO)

    @settings(max_examples=60, deadline=None)
    @given(small_signatures(), st.data())
    def test_matches_naive_engine(self, sig, data):
        lo = data.draw(st.integers(0, sig.domain - 1))
        hi = data.draw(st.integers(lo + 1, min(sig.domain, lo + 6)))
        gamma0 = Dyadic(data.draw(st.integers(0, 15)), data.draw(st.integers(0, 4)))
        h = table_use(sig)
        want, history = naive_hload(h, lo, hi, gamma0.to_fraction())
        tr = hload(h, (lo, hi), gamma0=gamma0)
        assert [g.to_fraction() for g in tr.gammas] == history
        assert hload_final(h, (lo, hi), gamma0).to_fraction() == want

    def test_final_only_agrees_on_long_interval(self):
        h = table_use(Signature.from_runs([(1, 5), (3, 6), (4, 6)]))
        assert hload_final(h, (0, 17)) == hload(h, (0, 17), record=False).final.gamma

    def test_trace_exports(self):
        tr = hload(offset_use(2), (1, 3))
        data = tr.to_json()
        assert data["final"]["gamma"] == {"value": "1/4", "dyadic": "1/2^2", "binary": "0.01"}
        assert tr.to_csv().splitlines()[0].startswith("step,mover")


class TestPredictions:
    @pytest.mark.parametrize("args,value", [((1, 0, 1), Fraction(1, 2)), ((2, 1, 2), Fraction(1, 4)),
                                            ((4, 2, 0), Fraction(1))])
    def test_atomic_formula(self, args, value):
        assert predict_atomic(*args).to_fraction() == value

    def test_base_case_reduces_to_atomic(self):
        for n in range(1, 3):
            m = 5 - n
            constraint, _ = predict_general(SIG, 2, 0, m)
            assert constraint == predict_atomic(n, 0, 3)

    def test_degenerate_m(self):
        constraint, _ = predict_general(SIG, 2, 1, 3)
        assert constraint == predict_general(SIG, 2, 0, 3)[0]

    @settings(max_examples=40, deadline=None)
    @given(small_signatures())
    def test_general_lemma(self, sig):
        for k, t, m in general_cases(sig):
            r = general_check(sig, k, t, m)
            assert r["equal"], (k, t, m)
            assert r["above_floor"] is not False, (k, t, m)


class TestStrategies:
    def test_padded_dominated(self):
        rep = compare_strategies(offset_use(2), (1, 4), padded_responder)
        assert rep.ok and rep.equal_stages == 1

    def test_self_comparison(self):
        rep = compare_strategies(offset_use(2), (1, 4), least_effort)
        assert rep.ok and rep.equal_stages == rep.stages + 1

    def test_random_over_responders(self):
        for seed in range(100):
            assert compare_strategies(offset_use(2), (1, 4), random_over_responder(seed)).ok

    def test_accumulation(self):
        assert accumulation_check(offset_use(1), (3, 5), ZERO).ok
        assert accumulation_check(offset_use(1), (3, 5), Dyadic(1, 1)).ok

    def test_accumulation_precondition(self):
        with pytest.raises(ValueError):
            accumulation_check(offset_use(1), (3, 5), Dyadic(1, 6))


class TestFalseBound:
    def test_search_finds_counterexample(self):
        res = false_bound_search(seed=1, budget=200)
        assert res.found
        assert res.gamma < res.bound
        assert hload(table_use(res.signature), res.interval).final.gamma == res.gamma

    def test_constant_use_is_exact(self):
        def one_run(rng):
            sig = Signature.from_runs([(rng.randint(0, 5), rng.randint(1, 6))])
            lo = rng.randint(0, sig.domain - 1)
            return sig, (lo, rng.randint(lo + 1, sig.domain))

        res = false_bound_search(seed=3, budget=200, generator=one_run)
        assert not res.found and res.examined == 200
        rng = random.Random(3)
        sig, (lo, hi) = one_run(rng)
        assert false_bound(sig.g, (lo, hi)) == predict_atomic(hi - lo, lo, sig.constant(0))

    def test_zero_budget(self):
        res = false_bound_search(seed=0, budget=0)
        assert not res.found and res.examined == 0


def test_block_that_only_reaches_one():
    # the load on [4, 35] alone: its guaranteed value is exactly 1, not more
    sig = Signature(((0, 1, 1), (1, 2, 3), (2, 4, 35)))
    assert hload_final(table_use(sig), (3, 35)) == ONE
