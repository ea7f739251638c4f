import json

import pytest

from omegalab.construction import (
    MET_BY_CAPPED_GAMMA,
    MET_BY_DISAGREEMENT,
    OPEN,
    ConstructionTrace,
    LeastEffortTracker,
    RequirementState,
    ScriptedAdversary,
    action_bound,
    default_stage_budget,
    digit_isolation,
    requirement_active,
    run_construction,
    silent_adversary,
    verify_requirement,
)
from omegalab.dyadic import ONE, ZERO, Dyadic, prefix
from omegalab.games import hload, table_use
from omegalab.usefn import ConstructionPlan, Signature, build_plan, desk_signature

# a small hand-made plan: I_2 = [3, 6] at constant 4 gives blocks of 4 digits
SMALL = ConstructionPlan(Signature.from_runs([(0, 1), (1, 1), (4, 4), (5, 3)]), (1, 2, 3))


def _copycat():
    def fn(which, t, alpha, beta):
        return prefix(alpha if which == "alpha" else beta, t) & 1
    return ScriptedAdversary(fn, "copycat")


class TestBookkeeping:
    def test_action_bound_uses_block_width(self):
        assert SMALL.blocks() == [(3, 6), (7, 9)]
        assert action_bound(SMALL, 0) == 2 * (2**4 - 1)
        assert action_bound(SMALL, 1) == 2 * (2**3 - 1)
        assert default_stage_budget(SMALL) == 4 * (16 + 8)

    def test_active_needs_agreement_and_budget(self):
        st = RequirementState(0, SMALL.block(0))
        assert requirement_active(SMALL, st, _copycat(), ZERO, ZERO)
        assert not requirement_active(SMALL, st, silent_adversary(), ZERO, ZERO)
        st.actions_taken = action_bound(SMALL, 0)
        assert not requirement_active(SMALL, st, _copycat(), ZERO, ZERO)


class TestTracker:
    def test_matches_engine_gammas(self):
        sig = Signature.from_runs([(0, 1), (1, 2), (2, 3)])
        h = table_use(sig)
        tr = LeastEffortTracker(h, 6, allow_overflow=True)
        alpha = beta = ZERO
        step = Dyadic(1, 6)
        for _ in range(2**3 - 1):
            alpha = alpha + step
            tr.observe(alpha, beta)
            beta = beta + step
            tr.observe(alpha, beta)
        assert tr.gammas == hload(h, (3, 6)).gammas

    def test_changes_beyond_horizon_are_free(self):
        tr = LeastEffortTracker(lambda x: x, 3)
        tr.observe(Dyadic(1, 5), ZERO)
        assert tr.gamma == ZERO and tr.answer("alpha", 3) == 0
        assert tr.first_disagreement("alpha", Dyadic(1, 5), 1, 4) == 4

    def test_caps_instead_of_passing_one(self):
        tr = LeastEffortTracker(lambda x: x, 4)
        tr.observe(Dyadic(1, 1), ZERO)
        tr.observe(Dyadic(1, 1), Dyadic(1, 1))
        tr.observe(Dyadic(3, 2), Dyadic(1, 1))
        assert tr.capped and tr.gamma <= ONE

    def test_rejects_decreasing_use(self):
        with pytest.raises(ValueError):
            LeastEffortTracker(lambda x: 5 - x, 4)


class TestRun:
    def test_least_effort_is_beaten(self):
        plan = build_plan(desk_signature(1), 1)
        adv = LeastEffortTracker(table_use(plan.signature), plan.block(0)[1])
        trace = run_construction(plan, [adv], record=False)
        out = verify_requirement(trace, 0)
        assert out["outcome"] == MET_BY_CAPPED_GAMMA and out["witness"] is not None
        assert trace.requirements[0].actions_taken <= action_bound(plan, 0)
        assert ZERO <= trace.alpha <= ONE and ZERO <= trace.beta <= ONE
        assert digit_isolation(plan, trace)

    def test_silent_adversary(self):
        plan = build_plan(desk_signature(1), 1)
        trace = run_construction(plan, [silent_adversary()])
        assert trace.stages == []
        assert verify_requirement(trace, 0)["outcome"] == MET_BY_DISAGREEMENT

    def test_unbounded_copier_flags_overflow(self):
        plan = build_plan(desk_signature(1), 1)
        adv = LeastEffortTracker(table_use(plan.signature), plan.block(0)[1], allow_overflow=True)
        trace = run_construction(plan, [adv], record=False)
        out = verify_requirement(trace, 0)
        assert out["outcome"] == OPEN and out["gamma_exceeds_one"]
        assert trace.requirements[0].actions_taken == action_bound(plan, 0)

    def test_empty_trace(self):
        assert verify_requirement(ConstructionTrace({}, []), 0)["outcome"] == OPEN

    def test_two_blocks_isolated(self):
        # requirement 0 is beaten at once, requirement 1 copies and runs its full load
        adv1 = LeastEffortTracker(lambda x: x + 40, SMALL.block(1)[1], allow_overflow=True)
        trace = run_construction(SMALL, [silent_adversary(), adv1])
        assert [r.actions_taken for r in trace.requirements] == [0, action_bound(SMALL, 1)]
        assert digit_isolation(SMALL, trace)
        # nothing ever reached J_0's digits
        assert prefix(trace.alpha, 6) == 0 and prefix(trace.beta, 6) == 0

    def test_replay_identical(self):
        def go():
            adv = [LeastEffortTracker(lambda x: x + 2, SMALL.block(e)[1]) for e in range(2)]
            return run_construction(SMALL, adv)

        a, b = go(), go()
        assert a.dumps() == b.dumps() and a.digest() == b.digest()
        assert json.loads(a.dumps())["requirements"][0]["block"] == [3, 6]

    def test_wrong_adversary_count(self):
        with pytest.raises(ValueError):
            run_construction(SMALL, [silent_adversary()])

    def test_budget_stop(self):
        adv = [LeastEffortTracker(lambda x: x + 40, SMALL.block(e)[1], allow_overflow=True) for e in range(2)]
        trace = run_construction(SMALL, adv, stage_budget=5)
        assert trace.terminated == "budget" and len(trace.stages) == 5
