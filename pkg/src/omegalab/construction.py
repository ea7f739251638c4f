"""Priority construction of two left-c.e. reals against a finite adversary pool.

Requirement ``e`` owns the digit block ``J_e`` of a :class:`ConstructionPlan`
and runs an h-load on it (adding ``2^-max J_e`` alternately to alpha and
beta) while its adversary keeps agreeing with both reals on
``J_0 .. J_e``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .dyadic import ONE, ZERO, Dyadic, first_digit_difference, prefix
from .usefn import ConstructionPlan, json_int

__all__ = [
    "Adversary",
    "LeastEffortTracker",
    "ScriptedAdversary",
    "silent_adversary",
    "RequirementState",
    "ConstructionTrace",
    "requirement_active",
    "run_construction",
    "verify_requirement",
    "digit_isolation",
    "default_stage_budget",
    "action_bound",
    "OPEN",
    "MET_BY_DISAGREEMENT",
    "MET_BY_CAPPED_GAMMA",
]

OPEN = "open"
MET_BY_DISAGREEMENT = "met_by_disagreement"
MET_BY_CAPPED_GAMMA = "met_by_capped_gamma"


def _digit(x: Dyadic, t: int) -> int:
    return prefix(x, t) & 1


class Adversary:
    """A triple (Phi, Psi, gamma) seen through its current answers.

    ``answer(which, t)`` is the current value of ``Phi^gamma(t)`` (``which ==
    "alpha"``) or ``Psi^gamma(t)``, or ``None`` while undefined.
    """

    gamma: Dyadic = ZERO
    capped: bool = False

    def observe(self, alpha: Dyadic, beta: Dyadic) -> None:
        pass

    def answer(self, which: str, t: int) -> Optional[int]:
        raise NotImplementedError

    def first_disagreement(self, which: str, value: Dyadic, lo: int, hi: int) -> Optional[int]:
        """Least ``t`` in ``[lo, hi]`` where the answer is not ``value``'s digit."""
        for t in range(lo, hi + 1):
            if self.answer(which, t) != _digit(value, t):
                return t
        return None

    def describe(self) -> str:
        return type(self).__name__


class LeastEffortTracker(Adversary):
    """Copies alpha and beta on digits ``1..horizon`` with use ``h``.

    After a change whose leftmost digit is ``k`` it raises gamma by the least
    amount that changes gamma's ``h(k)``-prefix, then re-commits its answers
    from ``k`` on.  It freezes instead of letting gamma pass 1 unless
    ``allow_overflow`` is set.
    """

    def __init__(self, h: Callable[[int], int], horizon: int, allow_overflow: bool = False):
        if not getattr(h, "monotone", False):
            for t in range(1, horizon):
                if h(t + 1) < h(t):
                    raise ValueError("tracker needs a nondecreasing use function")
        self.h = h
        self.horizon = horizon
        self.allow_overflow = allow_overflow
        self.capped = False
        self.snap = {"alpha": ZERO, "beta": ZERO}
        self.demands: list[int] = []
        # gamma is _g * 2^-_scale; history keeps the same pairs
        self._g, self._scale = 0, 0
        self.gamma = ZERO
        self._history: list[tuple[int, int]] = [(0, 0)]
        self._use: dict[int, int] = {}

    @property
    def gammas(self) -> list[Dyadic]:
        return [Dyadic._make(g, s) for g, s in self._history]

    def observe(self, alpha: Dyadic, beta: Dyadic) -> None:
        for which, value in (("alpha", alpha), ("beta", beta)):
            if self.capped:
                return
            old = self.snap[which]
            if old is value:
                continue
            sa, sb = old.scale, value.scale
            s = sa if sa > sb else sb
            a, b = old.mantissa << (s - sa), value.mantissa << (s - sb)
            if a == b:
                self.snap[which] = value
                continue
            if a >> s != b >> s:
                raise ValueError("reals left [0, 1)")
            k = s - ((a ^ b).bit_length() - 1)
            if k > self.horizon:
                # change beyond the horizon: no answers affected
                self.snap[which] = value
                continue
            d = self._use.get(k)
            if d is None:
                d = self._use[k] = self.h(k)
            g, G = self._g, self._scale
            if d > G:
                g, G = g << (d - G), d
            sh = G - d
            g = ((g >> sh) + 1) << sh
            if g > 1 << G and not self.allow_overflow:
                self.capped = True
                return
            self.demands.append(d)
            self._g, self._scale = g, G
            self.gamma = Dyadic._make(g, G)
            self._history.append((g, G))
            self.snap[which] = value

    def answer(self, which: str, t: int) -> Optional[int]:
        if not 1 <= t <= self.horizon:
            return None
        return _digit(self.snap[which], t)

    def first_disagreement(self, which: str, value: Dyadic, lo: int, hi: int) -> Optional[int]:
        snap = self.snap[which]
        if hi > self.horizon:
            return max(lo, self.horizon + 1)
        if snap == value:
            return None
        return first_digit_difference(snap, value, lo, hi)

    def describe(self) -> str:
        return f"least_effort(horizon={json_int(self.horizon)}{', overflow' if self.allow_overflow else ''})"


class ScriptedAdversary(Adversary):
    """Answers from a callable ``fn(which, t, alpha, beta)``; gamma never moves."""

    def __init__(self, fn: Callable[[str, int, Dyadic, Dyadic], Optional[int]], name: str = "scripted"):
        self.fn = fn
        self.name = name
        self.alpha = ZERO
        self.beta = ZERO

    def observe(self, alpha: Dyadic, beta: Dyadic) -> None:
        self.alpha, self.beta = alpha, beta

    def answer(self, which: str, t: int) -> Optional[int]:
        return self.fn(which, t, self.alpha, self.beta)

    def describe(self) -> str:
        return self.name


def silent_adversary() -> ScriptedAdversary:
    return ScriptedAdversary(lambda *_: None, "silent")


# bookkeeping ------------------------------------------------------------------


# Exponents past this are treated as this; such bounds are never reached.
BOUND_EXPONENT_CAP = 256


def action_bound(plan: ConstructionPlan, e: int) -> int:
    """``2 * (2^|J_e| - 1)``: the length of a complete h-load on ``J_e``."""
    lo, hi = plan.block(e)
    return 2 * ((1 << min(hi - lo + 1, BOUND_EXPONENT_CAP)) - 1)


def default_stage_budget(plan: ConstructionPlan) -> int:
    """``4 * sum_e 2^|J_e|``."""
    total = 0
    for lo, hi in plan.blocks():
        total += 1 << min(hi - lo + 1, BOUND_EXPONENT_CAP)
    return 4 * total


@dataclass
class RequirementState:
    e: int
    block: tuple[int, int]
    actions_taken: int = 0
    last_mover: Optional[str] = None
    outcome: str = OPEN


@dataclass
class ConstructionTrace:
    plan: dict
    adversaries: list[str]
    # (stage, e, mover, alpha, beta, gammas of every adversary)
    stages: list[tuple[int, int, str, Dyadic, Dyadic, tuple[Dyadic, ...]]] = field(default_factory=list)
    alpha: Dyadic = ZERO
    beta: Dyadic = ZERO
    requirements: list[RequirementState] = field(default_factory=list)
    # per requirement, at the end of the run: witness digit (or None), capped flag, gamma
    final_views: list[dict] = field(default_factory=list)
    terminated: str = "quiescent"
    budget: int = 0

    def to_json(self, stages: bool = True) -> dict:
        return {
            "plan": self.plan,
            "adversaries": self.adversaries,
            "budget": self.budget,
            "terminated": self.terminated,
            "stages": [
                {"stage": s, "e": e, "mover": m, "alpha": str(a), "beta": str(b),
                 "gammas": [str(g) for g in gs]}
                for s, e, m, a, b, gs in self.stages
            ] if stages else [],
            "final": {"alpha": str(self.alpha), "beta": str(self.beta)},
            "requirements": [
                {
                    "e": r.e,
                    "block": [json_int(v) for v in r.block],
                    "actions": r.actions_taken,
                    "outcome": r.outcome,
                    "witness": v["witness"],
                    "capped": v["capped"],
                    "gamma": str(v["gamma"]),
                }
                for r, v in zip(self.requirements, self.final_views)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def digest(self) -> str:
        """SHA-256 over every recorded stage and the outcomes; equal runs give equal digests."""
        h = hashlib.sha256()
        for s, e, m, a, b, gs in self.stages:
            h.update(f"{s},{e},{m},{a},{b},{'|'.join(map(str, gs))}\n".encode())
        tail = self.to_json(stages=False)
        h.update(json.dumps(tail, sort_keys=True).encode())
        return h.hexdigest()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "e", "mover", "gamma_e"])
        for s, e, m, _, _, gs in self.stages:
            w.writerow([s, e, m, gs[e]])
        return buf.getvalue()


# the construction ---------------------------------------------------------------


def _region(plan: ConstructionPlan, e: int) -> tuple[int, int]:
    return plan.block(0)[0], plan.block(e)[1]


def _witness(adv: Adversary, alpha: Dyadic, beta: Dyadic, lo: int, hi: int) -> Optional[int]:
    wa = adv.first_disagreement("alpha", alpha, lo, hi)
    wb = adv.first_disagreement("beta", beta, lo, hi)
    found = [w for w in (wa, wb) if w is not None]
    return min(found) if found else None


def requirement_active(plan: ConstructionPlan, state: RequirementState, adversary: Adversary,
                       alpha: Dyadic, beta: Dyadic, _cache: Optional[dict] = None) -> bool:
    """Agreement on ``J_0 .. J_e`` (undefined counts as disagreement) and budget left."""
    e = state.e
    if _cache is None:
        bound, (lo, hi) = action_bound(plan, e), _region(plan, e)
    else:
        bound, lo, hi = _cache[e]
    if state.actions_taken >= bound:
        return False
    return _witness(adversary, alpha, beta, lo, hi) is None


def run_construction(plan: ConstructionPlan, adversaries: Sequence[Adversary],
                     stage_budget: Optional[int] = None, record: bool = True) -> ConstructionTrace:
    """Run stages until no requirement is active or the budget is spent.

    Adversaries only react to changes, so a stage with nothing active means
    nothing will ever change again.
    """
    E = plan.E
    if len(adversaries) != E:
        raise ValueError(f"need {E} adversaries, got {len(adversaries)}")
    budget = default_stage_budget(plan) if stage_budget is None else stage_budget
    reqs = [RequirementState(e, plan.block(e)) for e in range(E)]
    trace = ConstructionTrace(plan.to_json(), [a.describe() for a in adversaries],
                              requirements=reqs, budget=budget)
    cache = {e: (action_bound(plan, e), *_region(plan, e)) for e in range(E)}
    steps = {e: Dyadic.pow2(-plan.block(e)[1]) for e in range(E)}
    alpha = beta = ZERO
    for adv in adversaries:
        adv.observe(alpha, beta)
    trace.terminated = "quiescent"
    stage = 0
    while True:
        acting = next((r for r in reqs if requirement_active(plan, r, adversaries[r.e], alpha, beta, cache)), None)
        if acting is None:
            break
        if stage >= budget:
            trace.terminated = "budget"
            break
        stage += 1
        step = steps[acting.e]
        if acting.last_mover in (None, "beta"):
            alpha = alpha + step
            acting.last_mover = "alpha"
        else:
            beta = beta + step
            acting.last_mover = "beta"
        acting.actions_taken += 1
        for adv in adversaries:
            adv.observe(alpha, beta)
        if record:
            trace.stages.append((stage, acting.e, acting.last_mover, alpha, beta,
                                 tuple(a.gamma for a in adversaries)))
    trace.alpha, trace.beta = alpha, beta
    for r, adv in zip(reqs, adversaries):
        lo, hi = _region(plan, r.e)
        trace.final_views.append({
            "witness": _witness(adv, alpha, beta, lo, hi),
            "capped": adv.capped,
            "gamma": adv.gamma,
        })
        r.outcome = verify_requirement(trace, r.e)["outcome"]
    return trace


def digit_isolation(plan: ConstructionPlan, trace: ConstructionTrace) -> bool:
    """Each requirement's additions stay inside its own block.

    Requirement ``e`` adds ``2^-max J_e`` about ``a/2`` times to each real;
    isolation means neither count carries past ``min J_e`` and the reals are
    exactly the sum of those per-block counts.
    """
    alpha = beta = ZERO
    for r in trace.requirements:
        lo, hi = plan.block(r.e)
        na, nb = (r.actions_taken + 1) // 2, r.actions_taken // 2
        width = min(hi - lo + 1, BOUND_EXPONENT_CAP)
        if na >= 1 << width or nb >= 1 << width:
            return False
        alpha = alpha + Dyadic(na, hi)
        beta = beta + Dyadic(nb, hi)
    return alpha == trace.alpha and beta == trace.beta


def verify_requirement(trace: ConstructionTrace, e: int) -> dict:
    """Outcome of requirement ``e`` from a finished trace.

    ``met_by_capped_gamma`` when the adversary froze to keep gamma within 1,
    ``met_by_disagreement`` for any other disagreement, otherwise ``open``.
    ``gamma_exceeds_one`` flags an adversary that kept agreeing by letting
    gamma leave ``[0, 1]``.
    """
    if e >= len(trace.final_views):
        return {"e": e, "outcome": OPEN, "witness": None, "gamma_exceeds_one": False}
    view = trace.final_views[e]
    over = view["gamma"] > ONE
    if view["witness"] is None:
        outcome = OPEN
    elif view["capped"]:
        outcome = MET_BY_CAPPED_GAMMA
    else:
        outcome = MET_BY_DISAGREEMENT
    return {"e": e, "outcome": outcome, "witness": view["witness"], "gamma_exceeds_one": over}
