"""Kraft-Chaitin allocation and the Omega-oracle reductions built on it."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .coding import ApproxSequence
from .dyadic import ONE, ZERO, Dyadic, bits, leftmost_change, INTEGER_PART, prefix
from .usefn import UseTable

__all__ = [
    "CapacityError",
    "KCState",
    "kc_alloc",
    "ReductionTables",
    "least_threshold",
    "build_reduction",
    "decide_member",
    "stable_arguments",
    "SolovayTestLedger",
    "solovay_items",
    "bad_items",
    "reduce_real",
    "NoMatchingStage",
]


class CapacityError(ValueError):
    """Request weight exceeds the remaining free weight."""


class NoMatchingStage(LookupError):
    """No stage of the approximation agrees with the oracle prefix."""


def _weight(strings: Iterable[str]) -> Dyadic:
    total = ZERO
    for s in strings:
        total = total + Dyadic.pow2(-len(s))
    return total


def _comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


@dataclass
class KCState:
    """Online Kraft-Chaitin ledger: free strings plus assigned codewords."""

    free: set[str] = field(default_factory=lambda: {""})
    assigned: dict[int, str] = field(default_factory=dict)
    next_id: int = 0

    @property
    def remaining(self) -> Dyadic:
        return _weight(self.free)

    @property
    def used(self) -> Dyadic:
        return _weight(self.assigned.values())

    def check(self) -> None:
        """Raise AssertionError if the ledger invariants fail."""
        lengths = [len(s) for s in self.free]
        assert len(lengths) == len(set(lengths)), "two free strings share a length"
        assert self.remaining + self.used == ONE, "weight not conserved"
        pool = sorted(self.free) + sorted(self.assigned.values())
        for i, a in enumerate(pool):
            for b in pool[i + 1 :]:
                assert not _comparable(a, b), f"{a!r} and {b!r} are prefix-comparable"

    def _merge(self) -> None:
        changed = True
        while changed:
            changed = False
            for s in list(self.free):
                if s and s.endswith("0") and s[:-1] + "1" in self.free:
                    self.free -= {s, s[:-1] + "1"}
                    self.free.add(s[:-1])
                    changed = True
                    break

    def alloc(self, length: int, request_id: Optional[int] = None) -> str:
        return kc_alloc(self, length, request_id)


def kc_alloc(state: KCState, length: int, request_id: Optional[int] = None) -> str:
    """Assign a codeword of exactly ``length`` bits.

    Splits the longest free string not longer than ``length``: it becomes
    ``s + "0" * (length - len(s))`` and the siblings ``s + "0"*j + "1"`` go
    back to the free list.
    """
    if length < 0:
        raise ValueError("codeword length must be >= 0")
    fitting = [s for s in state.free if len(s) <= length]
    if not fitting:
        raise CapacityError(
            f"2^-{length} exceeds remaining weight {state.remaining}")
    s = max(fitting, key=lambda x: (len(x), x))
    state.free.remove(s)
    gap = length - len(s)
    for j in range(gap):
        state.free.add(s + "0" * j + "1")
    word = s + "0" * gap
    rid = state.next_id if request_id is None else request_id
    state.next_id = max(state.next_id, rid + 1)
    state.assigned[rid] = word
    state._merge()
    return word


# computing a c.e. set from Omega -------------------------------------------------


@dataclass
class ReductionTables:
    c: int
    # (n, stage, requested Omega prefix as a bit string, length g(n), codeword)
    requests: list[tuple[int, int, str, int, str]] = field(default_factory=list)
    kc: KCState = field(default_factory=KCState)

    @property
    def weight(self) -> Dyadic:
        return _weight(r[4] for r in self.requests)

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "weight": str(self.weight),
            "requests": [
                {"n": n, "stage": s, "omega_prefix": p, "length": l, "codeword": w}
                for n, s, p, l, w in self.requests
            ],
        }


def least_threshold(g: UseTable) -> int:
    """Least ``c < N`` with ``sum_{c < n <= N} 2^-g(n) < 1``."""
    tail = ZERO
    tails = []
    for n in range(len(g), 0, -1):
        tail = tail + Dyadic.pow2(-g(n))
        tails.append((n - 1, tail))
    # tails[i] = (c, sum over n > c); scan from c = 0 upward
    for c, w in reversed(tails):
        if w < ONE:
            return c
    raise ValueError("no threshold c leaves a nonempty tail of weight < 1")


def build_reduction(A: Sequence[tuple[int, int]], g: UseTable, omega: ApproxSequence) -> ReductionTables:
    """Request an ``g(n)``-bit description of ``Omega_s``'s ``g(n)``-prefix for each ``(n, s)`` in ``A``."""
    c = least_threshold(g)
    tables = ReductionTables(c)
    seen: set[int] = set()
    for n, s in sorted(A, key=lambda p: (p[1], p[0])):
        if n in seen:
            raise ValueError(f"{n} enumerated twice")
        seen.add(n)
        if n <= c:
            continue
        if not 0 <= s < len(omega):
            raise IndexError(f"stage {s} outside the Omega approximation")
        length = g(n)
        word = kc_alloc(tables.kc, length, n)
        tables.requests.append((n, s, bits(omega[s], length), length, word))
    if not tables.weight < ONE:
        raise AssertionError("request weight reached 1")
    return tables


def _first_match(omega: ApproxSequence, length: int, oracle_prefix: int) -> int:
    for s, w in enumerate(omega.values):
        if prefix(w, length) == oracle_prefix:
            return s
    raise NoMatchingStage(f"no stage matches the {length}-bit oracle prefix {oracle_prefix}")


def decide_member(n: int, oracle_prefix: int, tables: ReductionTables, A: Sequence[tuple[int, int]],
                  g: UseTable, omega: ApproxSequence) -> int:
    """Membership of ``n`` from Omega's ``g(n)``-prefix.

    Finds the first stage at which Omega shows the oracle prefix and reports
    whether ``n`` was enumerated by then.
    """
    if n <= tables.c:
        raise ValueError(f"n = {n} is below the threshold c = {tables.c}")
    s = _first_match(omega, g(n), oracle_prefix)
    return int(any(m == n and t <= s for m, t in A))


def stable_arguments(tables: ReductionTables, A: Sequence[tuple[int, int]], g: UseTable,
                     omega: ApproxSequence) -> set[int]:
    """Arguments ``n > c`` whose request string is not a prefix of the final Omega.

    These are exactly the ``n`` the reduction must get right.  Arguments never
    enumerated count as stable.
    """
    final = omega.final
    bad = {n for n, _, p, l, _ in tables.requests if bits(final, l) == p and prefix(final, l) >> l == 0}
    return {n for n in range(tables.c + 1, len(g) + 1) if n not in bad}


# c.e. reals from Omega via a Solovay test ----------------------------------------


@dataclass
class SolovayTestLedger:
    bound: Dyadic
    # (stage s, leftmost changed digit n, string Omega_{s+1} restricted to n + g(n))
    items: list[tuple[int, int, str]] = field(default_factory=list)
    weight: Dyadic = ZERO

    def add(self, stage: int, n: int, string: str) -> None:
        self.items.append((stage, n, string))
        self.weight = self.weight + Dyadic.pow2(-len(string))
        if self.weight > self.bound:
            raise AssertionError(f"ledger weight {self.weight} exceeds bound {self.bound}")

    def to_json(self) -> dict:
        return {
            "bound": str(self.bound),
            "weight": str(self.weight),
            "items": [{"stage": s, "n": n, "string": w} for s, n, w in self.items],
        }


def solovay_items(a: ApproxSequence, omega: ApproxSequence, g: UseTable) -> SolovayTestLedger:
    """Enumerate ``Omega_{s+1}`` restricted to ``n + g(n)`` whenever ``a`` changes first at digit ``n``."""
    if len(a) != len(omega):
        raise ValueError("approximations must have the same number of stages")
    bound = ZERO
    for n in range(1, len(g) + 1):
        bound = bound + Dyadic.pow2(-g(n))
    ledger = SolovayTestLedger(bound)
    for s in range(len(a) - 1):
        if a[s] == a[s + 1]:
            continue
        n = leftmost_change(a[s], a[s + 1])
        if n == INTEGER_PART:
            raise ValueError(f"stage {s + 1} reaches 1; the ledger needs values below 1")
        ledger.add(s, n, bits(omega[s + 1], n + g(n)))
    return ledger


def bad_items(ledger: SolovayTestLedger, omega: ApproxSequence) -> list[tuple[int, int, str]]:
    """Ledger items whose string is a prefix of the final Omega."""
    final = omega.final
    return [it for it in ledger.items if prefix(final, len(it[2])) >> len(it[2]) == 0
            and bits(final, len(it[2])) == it[2]]


def reduce_real(n: int, oracle_prefix: int, a: ApproxSequence, omega: ApproxSequence, g: UseTable) -> int:
    """``a``'s ``n``-digit prefix from Omega's ``(n + g(n))``-prefix."""
    s = _first_match(omega, n + g(n), oracle_prefix)
    return prefix(a[s], n)
