"""Verification suites: each expands a config into tasks and checks one task per row.

Every row carries an ``ok`` flag; a suite passes iff all rows do.  Task
checks are module-level functions so a process pool can run them.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

from .bounds import lower_bound_report
from .coding import MeteredBits, PrefixOracle, decode_real, encode_set, set_from_real
from .construction import (
    MET_BY_CAPPED_GAMMA,
    MET_BY_DISAGREEMENT,
    LeastEffortTracker,
    action_bound,
    digit_isolation,
    run_construction,
)
from .corpus import game_grid, general_cases, random_approx, random_reduction_case, signature_corpus
from .dyadic import ONE, ZERO, Dyadic, prefix
from .games import (
    accumulation_check,
    compare_strategies,
    demand_sequence,
    general_check,
    hload,
    offset_use,
    predict_atomic,
    random_over_responder,
    table_use,
)
from .machines import (
    CapacityError,
    KCState,
    bad_items,
    build_reduction,
    decide_member,
    kc_alloc,
    reduce_real,
    solovay_items,
    stable_arguments,
)
from .usefn import Signature, build_plan, condensation_check, desk_signature

__all__ = ["SUITES", "SuiteReport", "run_suite", "suite_tasks", "worker_count"]


@dataclass
class SuiteReport:
    suite: str
    config: dict
    rows: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def violations(self) -> int:
        return sum(1 for r in self.rows if not r["ok"])

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {"suite": self.suite, "config": self.config, "ok": self.ok,
                "violations": self.violations, "seconds": round(self.seconds, 3), "rows": self.rows}


# atomic ---------------------------------------------------------------------


def _atomic_tasks(cfg) -> list:
    return [(n, k, c) for n in cfg.n for k in cfg.k for c in cfg.c]


def check_atomic(task) -> dict:
    n, k, c = task
    got = hload(offset_use(c), (k, k + n), record=False).final.gamma
    want = predict_atomic(n, k, c)
    return {"n": n, "k": k, "c": c, "gamma": str(got), "binary": got.binary(),
            "predicted": str(want), "ok": got == want}


# general / truncated sums ---------------------------------------------------


def _corpus_tasks(cfg) -> list:
    return [(cfg.seed, i, sig.entries) for i, sig in enumerate(signature_corpus(cfg.seed, cfg.count))]


def check_general(task) -> dict:
    seed, idx, entries = task
    sig = Signature(entries)
    cases = bad = floors = 0
    first_bad = None
    for k, t, m in general_cases(sig):
        r = general_check(sig, k, t, m)
        cases += 1
        fine = r["equal"] and r["above_floor"] is not False
        floors += r["floor"] is not None
        if not fine:
            bad += 1
            if first_bad is None:
                first_bad = [k, t, m]
    return {"seed": seed, "index": idx, "signature": sig.to_json(), "cases": cases,
            "floor_cases": floors, "violations": bad, "first_violation": first_bad, "ok": bad == 0}


def check_truncsums(task) -> dict:
    seed, idx, entries = task
    sig = Signature(entries)
    cases = bad = 0
    min_slack = None
    for k in range(len(sig)):
        for t in range(k):
            rep = lower_bound_report(sig, k, t)
            cases += 1
            if not rep.holds:
                bad += 1
            elif min_slack is None or rep.slack < min_slack:
                min_slack = rep.slack
    return {"seed": seed, "index": idx, "signature": sig.to_json(), "cases": cases,
            "violations": bad, "min_slack": None if min_slack is None else str(min_slack), "ok": bad == 0}


# dominance / accumulation ---------------------------------------------------


def _game_tasks(cfg) -> list:
    return [(cfg.seed, i, cfg.per_game) for i in range(cfg.count)]


def check_dominance(task) -> dict:
    seed, i, per_game = task
    h, interval = game_grid(seed, i + 1)[i]
    bad = 0
    for j in range(per_game):
        rep = compare_strategies(h, interval, random_over_responder(seed * 1_000_003 + i * 1009 + j))
        bad += not rep.ok
    return {"seed": seed, "game": i, "h": h.describe()["h"], "interval": list(interval),
            "responders": per_game, "violations": bad, "ok": bad == 0}


def check_accumulation(task) -> dict:
    seed, i, per_game = task
    h, interval = game_grid(seed, i + 1)[i]
    rng = random.Random(seed * 7919 + i)
    top = min(demand_sequence(h, interval)) - 1
    bad = 0
    for _ in range(per_game):
        s = rng.randint(0, top)
        sigma = Dyadic(rng.randint(0, (1 << s) * 2), s)
        bad += not accumulation_check(h, interval, sigma).ok
    return {"seed": seed, "game": i, "h": h.describe()["h"], "interval": list(interval),
            "offsets": per_game, "violations": bad, "ok": bad == 0}


# construction ---------------------------------------------------------------


def _construction_tasks(cfg) -> list:
    return [(E,) for E in cfg.E]


def construct_desk(E: int, record: bool = True):
    sig = desk_signature(E)
    plan = build_plan(sig, E)
    h = table_use(sig)
    advs = [LeastEffortTracker(h, plan.block(e)[1]) for e in range(E)]
    return plan, run_construction(plan, advs, record=record)


def check_construction(task) -> dict:
    (E,) = task
    start = time.perf_counter()
    plan, trace = construct_desk(E)
    _, again = construct_desk(E)
    digest = trace.digest()
    replay = digest == again.digest()
    met = all(r.outcome in (MET_BY_DISAGREEMENT, MET_BY_CAPPED_GAMMA) for r in trace.requirements)
    in_unit = ZERO <= trace.alpha <= ONE and ZERO <= trace.beta <= ONE
    actions = [(r.actions_taken, action_bound(plan, r.e)) for r in trace.requirements]
    within = all(a <= b for a, b in actions)
    iso = digit_isolation(plan, trace)
    return {
        "E": E, "boundaries": list(plan.boundaries), "stages": len(trace.stages),
        "budget": trace.budget, "terminated": trace.terminated,
        "outcomes": [r.outcome for r in trace.requirements],
        "actions": [a for a, _ in actions],
        "alpha": str(trace.alpha), "beta": str(trace.beta),
        "met": met, "in_unit_interval": in_unit, "actions_within_bound": within,
        "digit_isolation": iso, "replay_identical": replay, "digest": digest,
        "seconds": round(time.perf_counter() - start, 3),
        "ok": met and in_unit and within and iso and replay and trace.terminated == "quiescent",
    }


# coding ---------------------------------------------------------------------


def _seeded_tasks(cfg) -> list:
    return [(cfg.seed, i) for i in range(cfg.count)]


def _approx(seed: int, i: int):
    return random_approx(random.Random(seed * 100_003 + i), allow_one=False)


def check_coding(task) -> dict:
    seed, i = task
    a = _approx(seed, i)
    p = a.precision
    bad: list[str] = []
    for n in range(1, p + 1):
        coded = encode_set(a, n)
        reader = MeteredBits(coded.bits)
        if decode_real(reader, a, n) != prefix(a.final, n):
            bad.append(f"roundtrip n={n}")
        if reader.max_read > (1 << n) - 1:
            bad.append(f"set meter n={n}")
    coded = encode_set(a, p)
    for j in range(1, len(coded.bits) + 1):
        oracle = PrefixOracle(a.final)
        if set_from_real(oracle, a, j) != int(coded.bits[j - 1]):
            bad.append(f"set bit {j}")
        if oracle.max_digit > j.bit_length():
            bad.append(f"real meter {j}")
    return {"seed": seed, "index": i, "stages": len(a), "precision": p,
            "violations": len(bad), "first_violation": bad[0] if bad else None, "ok": not bad}


# Kraft-Chaitin --------------------------------------------------------------


def check_kc(task) -> dict:
    seed, i = task
    rng = random.Random(seed * 31337 + i)
    state = KCState()
    bad: list[str] = []
    requests = rng.randint(1, 24)
    for r in range(requests):
        length = rng.randint(0, 8)
        fits = Dyadic.pow2(-length) <= state.remaining
        try:
            word = kc_alloc(state, length)
            if not fits:
                bad.append(f"request {r}: allocated beyond capacity")
            elif len(word) != length:
                bad.append(f"request {r}: length {len(word)} != {length}")
        except CapacityError:
            if fits:
                bad.append(f"request {r}: refused although it fits")
        try:
            state.check()
        except AssertionError as exc:
            bad.append(f"request {r}: {exc}")
    # the same generator also feeds reductions, whose weight must stay below 1
    A, g, omega, _ = random_reduction_case(rng)
    tables = build_reduction(A, g, omega)
    if not tables.weight < ONE:
        bad.append("reduction weight reached 1")
    return {"seed": seed, "index": i, "requests": requests, "used": str(state.used),
            "reduction_weight": str(tables.weight), "violations": len(bad),
            "first_violation": bad[0] if bad else None, "ok": not bad}


# reductions -----------------------------------------------------------------


def check_reduction(task) -> dict:
    seed, i = task
    rng = random.Random(seed * 65537 + i)
    A, g, omega, a = random_reduction_case(rng)
    bad: list[str] = []
    tables = build_reduction(A, g, omega)
    members = {n for n, _ in A}
    stable = stable_arguments(tables, A, g, omega)
    for n in sorted(stable):
        bit = decide_member(n, prefix(omega.final, g(n)), tables, A, g, omega)
        if bit != (n in members):
            bad.append(f"decide {n}")
    ledger = solovay_items(a, omega, g)
    if not ledger.weight <= ledger.bound:
        bad.append("ledger weight")
    for n in range(1, len(g) + 1):
        if reduce_real(n, prefix(omega.final, n + g(n)), omega, omega, g) != prefix(omega.final, n):
            bad.append(f"self-reduction {n}")
    late = max((s for s, _, _ in bad_items(ledger, omega)), default=-1)
    beyond = 0
    for n in range(1, 9):
        want = prefix(a.final, n)
        got = reduce_real(n, prefix(omega.final, n + g(n)), a, omega, g)
        # an error at n forces a bad item at or after the matching stage
        first = next(s for s, w in enumerate(omega.values) if prefix(w, n + g(n)) == prefix(omega.final, n + g(n)))
        if first > late:
            beyond += 1
            if got != want:
                bad.append(f"reduce {n}")
    return {"seed": seed, "index": i, "threshold": tables.c, "stable": len(stable),
            "ledger_items": len(ledger.items), "ledger_weight": str(ledger.weight),
            "ledger_bound": str(ledger.bound), "past_bad_items": beyond,
            "violations": len(bad), "first_violation": bad[0] if bad else None, "ok": not bad}


# condensation ---------------------------------------------------------------

CONDENSATION_TABLES: dict[str, Callable[[int], Dyadic]] = {
    "dyadic_steps": lambda i: Dyadic.pow2(-(i.bit_length() - 1)),
    "geometric": lambda i: Dyadic.pow2(-i),
}


def _condensation_tasks(cfg) -> list:
    return [(name, cfg.T) for name in CONDENSATION_TABLES]


def check_condensation(task) -> dict:
    name, T = task
    fn = CONDENSATION_TABLES[name]
    rep = condensation_check([fn(i) for i in range(1, (1 << T) + 1)], T)
    return {"table": name, "T": T, "levels": len(rep.levels), "violations": len(rep.violations),
            "first_violation": rep.violations[0] if rep.violations else None, "ok": rep.ok}


SUITES: dict[str, tuple[Callable[[Any], list], Callable[[Any], dict]]] = {
    "atomic": (_atomic_tasks, check_atomic),
    "general": (_corpus_tasks, check_general),
    "dominance": (_game_tasks, check_dominance),
    "accumulation": (_game_tasks, check_accumulation),
    "truncsums": (_corpus_tasks, check_truncsums),
    "construction": (_construction_tasks, check_construction),
    "coding": (_seeded_tasks, check_coding),
    "kc": (_seeded_tasks, check_kc),
    "reduction": (_seeded_tasks, check_reduction),
    "condensation": (_condensation_tasks, check_condensation),
}


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("OMEGALAB_WORKERS", "1")))
    except ValueError:
        return 1


def suite_tasks(suite: str, cfg) -> list:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return SUITES[suite][0](cfg)


def run_suite(suite: str, cfg, workers: int | None = None) -> SuiteReport:
    """Run every task of ``suite``; rows come back in task order whatever the pool does."""
    tasks = suite_tasks(suite, cfg)
    check = SUITES[suite][1]
    workers = worker_count() if workers is None else workers
    start = time.perf_counter()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(check, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [check(t) for t in tasks]
    config = cfg.to_json() if hasattr(cfg, "to_json") else dict(cfg.__dict__)
    return SuiteReport(suite, config, rows, time.perf_counter() - start)
