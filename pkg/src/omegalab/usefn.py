"""Use functions: tables, signatures, condensation, padding and interval plans.

Positions are 1-based throughout: a table ``g`` stores ``g(1), ..., g(N)``.
Anything that needs divergence of a series takes an explicit budget and
raises :class:`BudgetExceeded` when the finite table cannot supply it.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence, Union

from .dyadic import ONE, ZERO, Dyadic

__all__ = [
    "BudgetExceeded",
    "UseTable",
    "Signature",
    "ConstructionPlan",
    "signature_of",
    "CondensationReport",
    "condensation_check",
    "space_transform",
    "JPartitioner",
    "partition_J",
    "build_plan",
    "plan_threshold",
    "desk_signature",
]


def json_int(n: int) -> int | str:
    """Integers too long for decimal JSON are written as hex strings."""
    return n if n.bit_length() <= 4096 else hex(n)


def parse_int(v: int | str) -> int:
    return v if isinstance(v, int) else int(v, 0)


class BudgetExceeded(RuntimeError):
    """A divergence-dependent search ran off the end of its finite budget."""


@dataclass(frozen=True)
class UseTable:
    values: tuple[int, ...]
    monotone: bool = False

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ValueError("use table entries must be nonnegative")
        object.__setattr__(self, "values", vals)
        if self.monotone and any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError("table flagged monotone but decreases somewhere")

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "UseTable":
        vals = tuple(values)
        mono = all(a <= b for a, b in zip(vals, vals[1:]))
        return cls(vals, mono)

    @classmethod
    def from_function(cls, fn: Callable[[int], int], n: int) -> "UseTable":
        return cls.from_values(fn(i) for i in range(1, n + 1))

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= len(self.values):
            raise IndexError(f"use table has no entry at {i} (domain 1..{len(self.values)})")
        return self.values[i - 1]

    def to_json(self) -> list[int]:
        return list(self.values)


@dataclass(frozen=True)
class Signature:
    """Step decomposition of a nondecreasing ``g``: ``g == c`` on ``[lo, hi]``."""

    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        ents = tuple((int(c), int(lo), int(hi)) for c, lo, hi in self.entries)
        object.__setattr__(self, "entries", ents)
        expect = 1
        for j, (c, lo, hi) in enumerate(ents):
            if lo != expect or hi < lo:
                raise ValueError(f"interval {j} = [{lo},{hi}] does not continue the partition at {expect}")
            if c < 0 or (j and c <= ents[j - 1][0]):
                raise ValueError("signature constants must be nonnegative and strictly increasing")
            expect = hi + 1

    @classmethod
    def from_runs(cls, runs: Sequence[tuple[int, int]]) -> "Signature":
        """Build from ``(constant, length)`` pairs."""
        out, lo = [], 1
        for c, size in runs:
            out.append((c, lo, lo + size - 1))
            lo += size
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.entries)

    def constant(self, j: int) -> int:
        return self.entries[j][0]

    def interval(self, j: int) -> tuple[int, int]:
        return self.entries[j][1], self.entries[j][2]

    def size(self, j: int) -> int:
        _, lo, hi = self.entries[j]
        return hi - lo + 1

    @property
    def constants(self) -> tuple[int, ...]:
        return tuple(c for c, _, _ in self.entries)

    @property
    def domain(self) -> int:
        return self.entries[-1][2] if self.entries else 0

    def weight(self, j: int) -> Dyadic:
        """``|I_j| * 2**-c_j``."""
        return Dyadic(self.size(j), self.constant(j))

    def table(self) -> UseTable:
        vals: list[int] = []
        for c, lo, hi in self.entries:
            vals.extend([c] * (hi - lo + 1))
        return UseTable(tuple(vals), True)

    @cached_property
    def _tops(self) -> list[int]:
        return [hi for _, _, hi in self.entries]

    def index_of(self, x: int) -> int:
        """``j`` with ``x`` in ``I_j``."""
        if not 1 <= x <= self.domain:
            raise IndexError(f"{x} outside signature domain 1..{self.domain}")
        return bisect.bisect_left(self._tops, x)

    def g(self, x: int) -> int:
        return self.entries[self.index_of(x)][0]

    def to_json(self) -> list[list[int | str]]:
        return [[json_int(v) for v in e] for e in self.entries]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int | str]]) -> "Signature":
        return cls(tuple(tuple(parse_int(v) for v in e) for e in data))  # type: ignore[arg-type]


def signature_of(g: UseTable) -> Signature:
    if not g.monotone or any(a > b for a, b in zip(g.values, g.values[1:])):
        raise ValueError("signature_of needs a nondecreasing table")
    entries: list[tuple[int, int, int]] = []
    for i, v in enumerate(g.values, start=1):
        if entries and entries[-1][0] == v:
            c, lo, _ = entries[-1]
            entries[-1] = (c, lo, i)
        else:
            entries.append((v, i, i))
    return Signature(tuple(entries))


# condensation ---------------------------------------------------------------


@dataclass
class CondensationReport:
    T: int
    # per level t = 1..T: (tail sum from 2^t, condensed sum from t, 2 * tail sum from 2^(t-1))
    levels: list[tuple[int, Dyadic, Dyadic, Dyadic]] = field(default_factory=list)
    violations: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "ok": self.ok,
            "violations": self.violations,
            "levels": [
                {"t": t, "tail": str(a), "condensed": str(b), "double_tail": str(c)}
                for t, a, b, c in self.levels
            ],
        }


def condensation_check(f: Sequence[Dyadic], T: int) -> CondensationReport:
    """Check the finite Cauchy-condensation sandwich on ``f(1..2**T)``.

    For each ``1 <= t <= T``::

        sum_{i=2^t}^{2^T} f(i) <= sum_{i=t}^{T} 2^i f(2^i) <= 2 * sum_{i=2^(t-1)}^{2^T} f(i)
    """
    top = 1 << T
    if len(f) < top:
        raise ValueError(f"need f(1..{top}), got {len(f)} values")
    vals = [Dyadic.coerce(v) for v in f[:top]]
    if any(v.mantissa == 0 for v in vals):
        raise ValueError("f must be positive")
    for i in range(top - 1):
        if vals[i + 1] > vals[i]:
            raise ValueError(f"f increases between {i + 1} and {i + 2}")

    # suffix[i] = sum_{j=i}^{top} f(j), 1-based
    suffix = [ZERO] * (top + 2)
    for i in range(top, 0, -1):
        suffix[i] = suffix[i + 1] + vals[i - 1]

    report = CondensationReport(T)
    condensed = ZERO
    cond_tail = [ZERO] * (T + 2)
    for i in range(T, -1, -1):
        condensed = condensed + vals[(1 << i) - 1].shift(i)
        cond_tail[i] = condensed
    for t in range(1, T + 1):
        low, mid, high = suffix[1 << t], cond_tail[t], suffix[1 << (t - 1)].shift(1)
        report.levels.append((t, low, mid, high))
        if not (low <= mid <= high):
            report.violations.append(t)
    return report


# space lemma ----------------------------------------------------------------


def space_transform(g: UseTable, K: int, budget: int | None = None) -> tuple[UseTable, list[tuple[int, int]]]:
    """Pad ``g`` so that it grows without losing divergence.

    Greedily cuts blocks ``[n_k, n_{k+1})`` starting at 1 with
    ``sum 2^-g > 2^k`` on block ``k`` and returns ``f = g + k`` on block ``k``
    (``g + K`` past the last block) together with the blocks.
    """
    if not g.monotone:
        raise ValueError("space_transform needs a nondecreasing table")
    limit = len(g) if budget is None else min(budget, len(g))
    blocks: list[tuple[int, int]] = []
    start = 1
    for k in range(K):
        need = Dyadic.pow2(k)
        acc, i = ZERO, start
        while acc <= need:
            if i > limit:
                raise BudgetExceeded(f"block {k} cannot exceed 2^{k} within index {limit}")
            acc = acc + Dyadic.pow2(-g(i))
            i += 1
        blocks.append((start, i))
        start = i
    f = []
    for i in range(1, len(g) + 1):
        k = next((b for b, (lo, hi) in enumerate(blocks) if lo <= i < hi), K)
        f.append(g(i) + k)
    return UseTable(tuple(f), True), blocks


# J_c(e) partitions ----------------------------------------------------------

UseLike = Union[UseTable, Callable[[int], int]]


def _eval(g: UseLike, x: int) -> int:
    try:
        return g(x)
    except IndexError as exc:
        raise BudgetExceeded(str(exc)) from None


class JPartitioner:
    """Issues consecutive, disjoint intervals of ``t`` values on request.

    ``exp``: ``sum_{t in J} 2^((t+c) - g(2^(t+c))) > 2^c``
    ``lin``: ``sum_{t in J} 2^(t - g(2^(t+1))) > 2^c``

    Intervals are handed out in request order starting at ``t = 0``; the
    issued list records which ``(e, c)`` got which interval.
    """

    def __init__(self, g: UseLike, budget: int):
        self.g = g
        self.budget = budget
        self.cursor = 0
        self.issued: list[tuple[int, int, str, tuple[int, int]]] = []

    def _term(self, t: int, c: int, variant: str) -> Dyadic:
        if variant == "exp":
            return Dyadic.pow2((t + c) - _eval(self.g, 1 << (t + c)))
        if variant == "lin":
            return Dyadic.pow2(t - _eval(self.g, 1 << (t + 1)))
        raise ValueError(f"unknown variant {variant!r}")

    def next(self, e: int, c: int, variant: str = "exp") -> tuple[int, int]:
        need = Dyadic.pow2(c)
        lo = t = self.cursor
        acc = ZERO
        while acc <= need:
            if t > self.budget:
                raise BudgetExceeded(f"J_{c}({e}) does not exceed 2^{c} by t = {self.budget}")
            acc = acc + self._term(t, c, variant)
            t += 1
        self.cursor = t
        self.issued.append((e, c, variant, (lo, t - 1)))
        return lo, t - 1


def partition_J(g: UseLike, e: int, c: int, variant: str = "exp", budget: int = 64,
                partitioner: JPartitioner | None = None) -> tuple[int, int]:
    """One interval ``J_c(e)``; pass a shared ``partitioner`` to keep intervals disjoint."""
    p = partitioner if partitioner is not None else JPartitioner(g, budget)
    return p.next(e, c, variant)


# construction plans ---------------------------------------------------------


@dataclass(frozen=True)
class ConstructionPlan:
    signature: Signature
    boundaries: tuple[int, ...]

    @property
    def E(self) -> int:
        return len(self.boundaries) - 1

    def block(self, e: int) -> tuple[int, int]:
        """Positions of ``J_e``: the union of ``I_j`` for ``j in (n_e, n_{e+1}]``."""
        a, b = self.boundaries[e], self.boundaries[e + 1]
        return self.signature.interval(a + 1)[0], self.signature.interval(b)[1]

    def blocks(self) -> list[tuple[int, int]]:
        return [self.block(e) for e in range(self.E)]

    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "boundaries": list(self.boundaries),
            "blocks": [[json_int(v) for v in b] for b in self.blocks()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionPlan":
        sig = Signature.from_json(data["signature"])
        if "boundaries" in data:
            return cls(sig, tuple(data["boundaries"]))
        return build_plan(sig, int(data["E"]))


def plan_threshold(sig: Signature, n_e: int, k: int) -> Dyadic:
    """``2^-m * S_k(k - n_e - 1)`` with ``m = max I_{n_e}``.

    This is the guaranteed final opponent value for an h-load on
    ``J = union of I_j, j in (n_e, k]``.
    """
    from .bounds import truncated_sums

    m = sig.interval(n_e)[1]
    return truncated_sums(sig, k).values[k - n_e - 1].shift(-m)


def build_plan(sig: Signature, E: int) -> ConstructionPlan:
    """Choose ``n_0 = 1 < n_1 < ...`` each minimal with ``plan_threshold > 1``."""
    bounds = [1]
    for _ in range(E):
        n_e = bounds[-1]
        k = n_e + 1
        while True:
            if k >= len(sig):
                raise BudgetExceeded(f"signature exhausted looking for n_{len(bounds)}")
            if plan_threshold(sig, n_e, k) > ONE:
                break
            k += 1
        bounds.append(k)
    return ConstructionPlan(sig, tuple(bounds))


def desk_signature(E: int, c0: int = 0) -> Signature:
    """Smallest signature (constants ``c0, c0+1, ...``, singleton ``I_0, I_1``) that carries an ``E``-block plan.

    Each further interval is the shortest one that clears the plan threshold
    on its own, so ``build_plan`` puts exactly one interval in each block.
    """
    runs = [(c0, 1), (c0 + 1, 1)]
    m = 2
    for _ in range(E):
        c_prev = runs[-1][0]
        size = ((1 << (m + c_prev)) + 1) << 1
        runs.append((c_prev + 1, size))
        m += size
    return Signature.from_runs(runs)
