"""Amplification games: the h-load process and checks of its lemmas.

Two players alpha and beta repeatedly add ``2^-hi`` on an interval
``(lo, hi]``; each time the mover's leftmost changed digit is ``k`` the
opponent gamma must change its prefix of length ``h(k)``.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .bounds import truncate, truncated_sums
from .dyadic import ZERO, Dyadic, least_increment, prefix
from .usefn import Signature, UseTable

__all__ = [
    "DemandError",
    "UseFunction",
    "offset_use",
    "table_use",
    "GameState",
    "GameStep",
    "GameTrace",
    "hload",
    "hload_final",
    "demand_sequence",
    "respond_least_effort",
    "least_effort",
    "padded_responder",
    "random_over_responder",
    "predict_atomic",
    "predict_general",
    "general_interval",
    "general_check",
    "compare_strategies",
    "DominanceReport",
    "accumulation_check",
    "AccumulationReport",
    "false_bound",
    "false_bound_search",
    "FalseBoundResult",
]

Strategy = Callable[[Dyadic, int], Dyadic]


class DemandError(ValueError):
    """A response left the demanded prefix of gamma unchanged."""


class UseFunction:
    """``h(x) = x + g(x)`` with a printable description."""

    def __init__(self, g: Callable[[int], int], text: str, table: Sequence[int] | None = None,
                 monotone: bool = False, signature: Signature | None = None):
        self._g = g
        self.text = text
        self.table = None if table is None else list(table)
        # g known to be nondecreasing, so h is increasing
        self.monotone = monotone
        self.signature = signature

    def g(self, x: int) -> int:
        return self._g(x)

    def __call__(self, x: int) -> int:
        return x + self._g(x)

    def describe(self) -> dict:
        out: dict = {"h": self.text}
        if self.table is not None:
            out["g"] = self.table
        if self.signature is not None:
            out["signature"] = self.signature.to_json()
        return out

    def __repr__(self) -> str:
        return f"UseFunction({self.text})"


def offset_use(c: int) -> UseFunction:
    if c < 0:
        raise ValueError("offset must be >= 0")
    return UseFunction(lambda x: c, f"x+{c}", monotone=True)


def table_use(g: UseTable | Signature | Sequence[int]) -> UseFunction:
    """``h(x) = x + g(x)``; a signature is read lazily, never expanded."""
    if isinstance(g, Signature):
        return UseFunction(g.g, "x+g", monotone=True, signature=g)
    if not isinstance(g, UseTable):
        g = UseTable.from_values(g)
    return UseFunction(g, "x+g", g.values, monotone=g.monotone)


def _describe(h: Callable[[int], int]) -> dict:
    return h.describe() if isinstance(h, UseFunction) else {"h": repr(h)}


# records ---------------------------------------------------------------------


@dataclass(frozen=True)
class GameState:
    alpha: Dyadic
    beta: Dyadic
    gamma: Dyadic
    step: int


@dataclass(frozen=True)
class GameStep:
    mover: str
    added: Dyadic
    k: int
    demand: int
    gamma_before: Dyadic
    gamma_after: Dyadic


def _dy(x: Dyadic) -> dict:
    return {"value": str(x.to_fraction()), "dyadic": str(x), "binary": x.binary()}


@dataclass
class GameTrace:
    config: dict
    steps: list[GameStep] = field(default_factory=list)
    final: Optional[GameState] = None

    @property
    def gammas(self) -> list[Dyadic]:
        """Gamma after each stage, starting with the initial value."""
        first = self.steps[0].gamma_before if self.steps else self.final.gamma
        return [first] + [s.gamma_after for s in self.steps]

    def to_json(self) -> dict:
        f = self.final
        return {
            "config": self.config,
            "steps": [
                {
                    "step": i + 1,
                    "mover": s.mover,
                    "added": str(s.added),
                    "k": s.k,
                    "demand": s.demand,
                    "gamma_before": str(s.gamma_before),
                    "gamma_after": str(s.gamma_after),
                }
                for i, s in enumerate(self.steps)
            ],
            "final": {
                "alpha": _dy(f.alpha),
                "beta": _dy(f.beta),
                "gamma": _dy(f.gamma),
                "steps": f.step,
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "mover", "added", "k", "demand", "gamma_before", "gamma_after", "gamma_binary"])
        for i, s in enumerate(self.steps):
            w.writerow([i + 1, s.mover, s.added, s.k, s.demand, s.gamma_before, s.gamma_after,
                        s.gamma_after.binary()])
        return buf.getvalue()


# strategies ------------------------------------------------------------------


def least_effort(gamma: Dyadic, demand: int) -> Dyadic:
    return least_increment(gamma, demand)


def padded_responder(gamma: Dyadic, demand: int) -> Dyadic:
    """Least effort plus an extra ``2^-demand`` every time."""
    return least_increment(gamma, demand) + Dyadic.pow2(-demand)


def random_over_responder(seed: int, extra_bits: int = 3, p_extra: float = 0.5) -> Strategy:
    """A legal strategy that sometimes overshoots by a random dyadic amount."""
    rng = random.Random(seed)

    def respond(gamma: Dyadic, demand: int) -> Dyadic:
        base = least_increment(gamma, demand)
        if rng.random() >= p_extra:
            return base
        j = rng.randint(0, extra_bits)
        return base + Dyadic(rng.randint(1, 1 << extra_bits), demand + j)

    return respond


# the engine -------------------------------------------------------------------


def _moves(lo: int, hi: int, first: str) -> Iterator[tuple[str, int]]:
    """(mover, leftmost changed digit) for each stage of an h-load on (lo, hi]."""
    other = "beta" if first == "alpha" else "alpha"
    target = (1 << (hi - lo)) - 1
    for v in range(target):
        k = hi - ((v ^ (v + 1)).bit_length() - 1)
        yield first, k
        yield other, k


def _check_interval(h: Callable[[int], int], lo: int, hi: int) -> None:
    if not 0 <= lo < hi:
        raise ValueError(f"bad interval ({lo}, {hi}]")
    for k in range(lo + 1, hi + 1):
        if h(k) < k:
            raise ValueError(f"use function must satisfy h(x) >= x; h({k}) = {h(k)}")


def demand_sequence(h: Callable[[int], int], interval: tuple[int, int], first: str = "alpha") -> list[int]:
    lo, hi = interval
    _check_interval(h, lo, hi)
    return [h(k) for _, k in _moves(lo, hi, first)]


def respond_least_effort(demands: Sequence[int], gamma0: Dyadic = ZERO) -> list[Dyadic]:
    """Gamma after each demand under least effort, starting from ``gamma0``."""
    out, g = [gamma0], gamma0
    for d in demands:
        g = g + least_increment(g, d)
        out.append(g)
    return out


def hload(
    h: Callable[[int], int],
    interval: tuple[int, int],
    strategy: Optional[Strategy] = None,
    gamma0: Dyadic = ZERO,
    first: str = "alpha",
    record: bool = True,
) -> GameTrace:
    """Run the h-load process on ``(lo, hi]``.

    ``strategy=None`` is least effort, computed on integers at a fixed scale.
    Any other strategy is called as ``strategy(gamma, demand)`` and must
    return an increment that changes ``gamma``'s prefix of length ``demand``.
    With ``record=False`` only the final state is kept.
    """
    lo, hi = interval
    if first not in ("alpha", "beta"):
        raise ValueError("first mover must be 'alpha' or 'beta'")
    _check_interval(h, lo, hi)
    gamma0 = Dyadic.coerce(gamma0)
    config = {"interval": [lo, hi], "first": first, "gamma0": str(gamma0),
              "strategy": "least_effort" if strategy is None else getattr(strategy, "__name__", "custom"),
              **_describe(h)}
    trace = GameTrace(config)
    added = Dyadic.pow2(-hi)
    demand_of = {k: h(k) for k in range(lo + 1, hi + 1)}
    pos = {"alpha": 0, "beta": 0}
    steps = 0

    if strategy is None:
        G = max(max(demand_of.values()), gamma0.scale)
        g = prefix(gamma0, G)
        for mover, k in _moves(lo, hi, first):
            d = demand_of[k]
            sh = G - d
            g_new = ((g >> sh) + 1) << sh
            if record:
                trace.steps.append(GameStep(mover, added, k, d, Dyadic(g, G), Dyadic(g_new, G)))
            g = g_new
            pos[mover] += 1
            steps += 1
        gamma = Dyadic(g, G)
    else:
        gamma = gamma0
        for mover, k in _moves(lo, hi, first):
            d = demand_of[k]
            inc = Dyadic.coerce(strategy(gamma, d))
            new = gamma + inc
            if inc.mantissa == 0 or prefix(new, d) == prefix(gamma, d):
                raise DemandError(f"step {steps + 1}: response {inc} leaves gamma's {d}-prefix unchanged")
            if record:
                trace.steps.append(GameStep(mover, added, k, d, gamma, new))
            gamma = new
            pos[mover] += 1
            steps += 1

    trace.final = GameState(Dyadic(pos["alpha"], hi), Dyadic(pos["beta"], hi), gamma, steps)
    return trace


def hload_final(
    h: Callable[[int], int],
    interval: tuple[int, int],
    gamma0: Dyadic = ZERO,
) -> Dyadic:
    """Final gamma of the least-effort h-load, without walking every stage.

    A load on ``(j, hi]`` is a load on ``(j+1, hi]``, two moves at digit
    ``j+1``, then the ``(j+1, hi]`` load again.  Every demand inside is at
    least ``D = min h`` over the interval, and least-effort responses to such
    demands only read gamma below digit ``D``; the part of gamma above ``D``
    is carried through unchanged.  Results are memoized on that low part.
    """
    lo, hi = interval
    _check_interval(h, lo, hi)
    gamma0 = Dyadic.coerce(gamma0)
    demand = {k: h(k) for k in range(lo + 1, hi + 1)}
    G = max(max(demand.values()), gamma0.scale)
    # smallest demand inside (j, hi]
    floor_demand = {hi - 1: demand[hi]}
    for j in range(hi - 2, lo - 1, -1):
        floor_demand[j] = min(demand[j + 1], floor_demand[j + 1])
    memo: dict[tuple[int, int], int] = {}

    def bump(g: int, d: int) -> int:
        sh = G - d
        return ((g >> sh) + 1) << sh

    def run(j: int, g: int) -> int:
        if j == hi:
            return g
        low_bits = G - floor_demand[j]
        r = g & ((1 << low_bits) - 1)
        key = (j, r)
        out = memo.get(key)
        if out is None:
            d = demand[j + 1]
            x = run(j + 1, r)
            x = bump(bump(x, d), d)
            out = run(j + 1, x)
            memo[key] = out
        return g - r + out

    return Dyadic(run(lo, prefix(gamma0, G)), G)


# predictions ------------------------------------------------------------------


def predict_atomic(n: int, k: int, c: int) -> Dyadic:
    """Final gamma of the ``(x + c)``-load on ``(k, k + n]``: ``n * 2^-(k+c)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Dyadic(n, k + c)


def general_interval(sig: Signature, k: int, t: int, m: int) -> tuple[int, int]:
    """``(m, max I_k]``, the load interval for the general prediction."""
    _check_general(sig, k, t, m)
    return m, sig.interval(k)[1]


def _check_general(sig: Signature, k: int, t: int, m: int) -> None:
    if not 0 <= t <= k < len(sig):
        raise IndexError(f"need 0 <= t <= k < {len(sig)}, got t = {t}, k = {k}")
    lo, hi = sig.interval(k - t)
    if not lo - 1 <= m <= hi:
        raise IndexError(f"m = {m} must lie in [{lo - 1}, {hi}]")
    if m == hi and t == 0:
        raise IndexError("m = max I_k leaves an empty load interval")


def predict_general(sig: Signature, k: int, t: int, m: int) -> tuple[Dyadic, Optional[Dyadic]]:
    """Required ``T(2^m gamma, c_{k-t})`` and, where defined, the floor ``2^-m S_k(t)``.

    The floor exists when ``m`` sits just below ``I_{k-t}`` and ``t < k``.
    """
    _check_general(sig, k, t, m)
    sums = truncated_sums(sig, k)
    lo, hi = sig.interval(k - t)
    constraint = sums[t - 1] + Dyadic(hi - m, sig.constant(k - t))
    floor = sums[t].shift(-m) if (m == lo - 1 and t < k) else None
    return constraint, floor


def general_check(sig: Signature, k: int, t: int, m: int) -> dict:
    """Run the engine and compare with :func:`predict_general`."""
    constraint, floor = predict_general(sig, k, t, m)
    lo, hi = general_interval(sig, k, t, m)
    if lo == hi:
        # empty load: nothing happens, gamma stays 0
        gamma = ZERO
    else:
        gamma = hload_final(table_use(sig), (lo, hi))
    got = truncate(gamma.shift(m), k - t, sig.constants)
    return {
        "k": k, "t": t, "m": m,
        "gamma": gamma,
        "truncated": got,
        "constraint": constraint,
        "floor": floor,
        "equal": got == constraint,
        "above_floor": None if floor is None else gamma >= floor,
    }


# lemma checks -----------------------------------------------------------------


@dataclass
class DominanceReport:
    stages: int
    first_violation: Optional[int]
    equal_stages: int

    @property
    def ok(self) -> bool:
        return self.first_violation is None


def compare_strategies(h: Callable[[int], int], interval: tuple[int, int], alt: Strategy) -> DominanceReport:
    """Stage-by-stage check that least effort never exceeds ``alt``."""
    base = hload(h, interval).gammas
    other = hload(h, interval, strategy=alt).gammas
    first_bad = next((s for s, (a, b) in enumerate(zip(base, other)) if a > b), None)
    equal = sum(1 for a, b in zip(base, other) if a == b)
    return DominanceReport(len(base) - 1, first_bad, equal)


@dataclass
class AccumulationReport:
    sigma: Dyadic
    stages: int
    first_violation: Optional[int]

    @property
    def ok(self) -> bool:
        return self.first_violation is None


def accumulation_check(h: Callable[[int], int], interval: tuple[int, int], sigma: Dyadic) -> AccumulationReport:
    """Twin least-effort runs from 0 and from ``sigma``; the gap must stay ``sigma``."""
    sigma = Dyadic.coerce(sigma)
    demands = demand_sequence(h, interval)
    if demands and min(demands) <= sigma.scale:
        raise ValueError(
            f"demand at {min(demands)} reaches into sigma's expansion of length {sigma.scale}")
    plain = hload(h, interval).gammas
    shifted = hload(h, interval, gamma0=sigma).gammas
    bad = next((s for s, (a, b) in enumerate(zip(plain, shifted)) if a + sigma != b), None)
    return AccumulationReport(sigma, len(plain) - 1, bad)


def false_bound(g: Callable[[int], int], interval: tuple[int, int]) -> Dyadic:
    """``2^-lo * sum_{i in (lo, hi]} 2^-g(i)``."""
    lo, hi = interval
    total = ZERO
    for i in range(lo + 1, hi + 1):
        total = total + Dyadic.pow2(-g(i))
    return total.shift(-lo)


@dataclass
class FalseBoundResult:
    found: bool
    examined: int
    signature: Optional[Signature] = None
    interval: Optional[tuple[int, int]] = None
    gamma: Optional[Dyadic] = None
    bound: Optional[Dyadic] = None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "examined": self.examined,
            "signature": None if self.signature is None else self.signature.to_json(),
            "interval": None if self.interval is None else list(self.interval),
            "gamma": None if self.gamma is None else str(self.gamma),
            "bound": None if self.bound is None else str(self.bound),
        }


def two_interval_signatures(rng: random.Random) -> tuple[Signature, tuple[int, int]]:
    """Default generator: two runs with a constant gap of at least 2."""
    c0 = rng.randint(0, 3)
    c1 = c0 + rng.randint(2, 4)
    sig = Signature.from_runs([(c0, rng.randint(1, 4)), (c1, rng.randint(1, 4))])
    lo = rng.randint(0, sig.domain - 1)
    hi = rng.randint(lo + 1, sig.domain)
    return sig, (lo, hi)


def false_bound_search(
    seed: int,
    budget: int,
    generator: Callable[[random.Random], tuple[Signature, tuple[int, int]]] = two_interval_signatures,
) -> FalseBoundResult:
    """Look for a load whose final gamma falls strictly below :func:`false_bound`."""
    rng = random.Random(seed)
    for i in range(budget):
        sig, interval = generator(rng)
        h = table_use(sig)
        gamma = hload(h, interval, record=False).final.gamma
        bound = false_bound(sig.g, interval)
        if gamma < bound:
            return FalseBoundResult(True, i + 1, sig, interval, gamma, bound)
    return FalseBoundResult(False, budget)
