"""Seeded generators for the verification corpora."""

from __future__ import annotations

import random
from typing import Iterator

from .coding import ApproxSequence
from .dyadic import Dyadic
from .games import UseFunction, offset_use, table_use
from .usefn import Signature, UseTable

__all__ = [
    "random_signature",
    "signature_corpus",
    "general_cases",
    "game_grid",
    "random_approx",
    "random_reduction_case",
]


def random_signature(rng: random.Random, max_intervals: int = 6, max_size: int = 8,
                     max_constant: int = 16) -> Signature:
    n = rng.randint(1, max_intervals)
    constants = sorted(rng.sample(range(max_constant + 1), n))
    return Signature.from_runs([(c, rng.randint(1, max_size)) for c in constants])


def signature_corpus(seed: int, count: int, **limits) -> list[Signature]:
    rng = random.Random(seed)
    return [random_signature(rng, **limits) for _ in range(count)]


def general_cases(sig: Signature) -> Iterator[tuple[int, int, int]]:
    """Every ``(k, t, m)`` with ``t <= k`` and ``m`` in ``[min I_{k-t} - 1, max I_{k-t}]``."""
    for k in range(len(sig)):
        for t in range(k + 1):
            lo, hi = sig.interval(k - t)
            for m in range(lo - 1, hi + 1):
                if m == hi and t == 0:
                    continue
                yield k, t, m


def game_grid(seed: int, games: int = 20, max_width: int = 6) -> list[tuple[UseFunction, tuple[int, int]]]:
    """Half constant-offset uses, half signature uses; intervals of width <= ``max_width``."""
    rng = random.Random(seed)
    out = []
    for i in range(games):
        if i % 2 == 0:
            h = offset_use(rng.randint(0, 6))
            lo = rng.randint(0, 6)
        else:
            sig = random_signature(rng, max_intervals=4, max_size=4, max_constant=8)
            h = table_use(sig)
            lo = rng.randint(0, max(0, sig.domain - 1))
        width = rng.randint(1, max_width)
        if i % 2:
            width = min(width, h.signature.domain - lo)
        out.append((h, (lo, lo + width)))
    return out


def random_approx(rng: random.Random, max_stages: int = 64, max_precision: int = 12,
                  allow_one: bool = True) -> ApproxSequence:
    """Nondecreasing values in ``[0, 1]`` (or ``[0, 1)``) on a grid of ``2^-p``."""
    p = rng.randint(1, max_precision)
    top = (1 << p) if allow_one else (1 << p) - 1
    stages = rng.randint(1, max_stages)
    vals = sorted(rng.randint(0, top) for _ in range(stages))
    if rng.random() < 0.5:
        vals[0] = 0
    return ApproxSequence(tuple(Dyadic(v, p) for v in vals))


def random_reduction_case(rng: random.Random, max_n: int = 10, max_stages: int = 40
                          ) -> tuple[list[tuple[int, int]], UseTable, ApproxSequence, ApproxSequence]:
    """``(A, g, omega, a)``: an enumeration, a nondecreasing use table and two approximations below 1.

    ``g`` is covering enough that the lengths the reductions read exist.
    """
    stages = rng.randint(2, max_stages)
    omega = random_approx(rng, max_stages=stages, max_precision=14, allow_one=False)
    omega = ApproxSequence(omega.values + (omega.final,) * (stages - len(omega)))
    a_vals = sorted(Dyadic(rng.randint(0, (1 << 8) - 1), 8) for _ in range(stages))
    a = ApproxSequence(tuple(a_vals))
    slope = rng.randint(1, 3)
    extra = rng.randint(1, 3)
    g = UseTable.from_function(lambda n: slope * n + extra, max(max_n, 8))
    members = rng.sample(range(1, max_n + 1), rng.randint(0, max_n))
    A = [(n, rng.randrange(stages)) for n in members]
    return A, g, omega, a
