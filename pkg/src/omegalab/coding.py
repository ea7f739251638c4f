"""Coding a left-c.e. real into a c.e. set and back.

Digit ``i`` of the real owns a block of ``2^(i-1)`` bits in the set; the
block reads ``1^p 0^rest`` where ``p`` counts the 0->1 flips of digit ``i``
along the approximation.  Blocks sit at offsets ``0, 1, 3, 7, ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dyadic import ONE, Dyadic, prefix

__all__ = [
    "ApproxSequence",
    "CodedSet",
    "MeteredBits",
    "PrefixOracle",
    "DecodeError",
    "flip_counts",
    "encode_set",
    "decode_real",
    "set_from_real",
    "block_of",
]


class DecodeError(ValueError):
    """The replay never reached the state a coded input describes."""


@dataclass(frozen=True)
class ApproxSequence:
    values: tuple[Dyadic, ...]

    def __post_init__(self) -> None:
        vals = tuple(Dyadic.coerce(v) for v in self.values)
        if not vals:
            raise ValueError("an approximation needs at least one stage")
        for a, b in zip(vals, vals[1:]):
            if b < a:
                raise ValueError(f"approximation decreases: {a} -> {b}")
        if vals[-1] > ONE:
            raise ValueError("approximation leaves [0, 1]")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, values: Iterable) -> "ApproxSequence":
        return cls(tuple(Dyadic.coerce(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, s: int) -> Dyadic:
        return self.values[s]

    @property
    def final(self) -> Dyadic:
        return self.values[-1]

    @property
    def precision(self) -> int:
        return max(v.scale for v in self.values)

    def to_json(self) -> list[str]:
        return [str(v) for v in self.values]

    @classmethod
    def from_json(cls, data: Sequence) -> "ApproxSequence":
        return cls.of(data)

    @classmethod
    def load(cls, path: str) -> "ApproxSequence":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _digit(x: Dyadic, i: int) -> int:
    return prefix(x, i) & 1


def block_of(n: int) -> tuple[int, int]:
    """For 1-based set bit ``n``: (digit whose block holds it, 0-based offset inside)."""
    if n < 1:
        raise ValueError("set bits are numbered from 1")
    i = n.bit_length()
    return i, n - (1 << (i - 1))


def _below_one(a: ApproxSequence) -> None:
    # 1 has no finite expansion of the form 0.b1b2...; the digit counts cannot see it
    if a.final >= ONE:
        raise ValueError("coding needs an approximation that stays below 1")


def flip_counts(a: ApproxSequence, n: int) -> list[int]:
    """0->1 transitions of digits ``1..n``; entry ``i-1`` is digit ``i``."""
    _below_one(a)
    counts = [0] * n
    for x, y in zip(a.values, a.values[1:]):
        px, py = prefix(x, n), prefix(y, n)
        rose = ~px & py
        for i in range(1, n + 1):
            if (rose >> (n - i)) & 1:
                counts[i - 1] += 1
    return counts


@dataclass(frozen=True)
class CodedSet:
    bits: str

    @property
    def digits(self) -> int:
        return (len(self.bits) + 1).bit_length() - 1

    def block(self, i: int) -> str:
        start = (1 << (i - 1)) - 1
        return self.bits[start : start + (1 << (i - 1))]

    def __str__(self) -> str:
        return self.bits


def encode_set(a: ApproxSequence, n: int) -> CodedSet:
    """Blocks for digits ``1..n``; ``2^n - 1`` bits in all."""
    out = []
    for i, p in enumerate(flip_counts(a, n), start=1):
        size = 1 << (i - 1)
        if p > size:
            raise AssertionError(f"digit {i} flipped {p} > {size} times")
        out.append("1" * p + "0" * (size - p))
    return CodedSet("".join(out))


class MeteredBits:
    """Read access to a bit string that remembers how far it was read."""

    def __init__(self, bits: str):
        self._bits = bits
        self.max_read = 0
        self.reads = 0

    def __getitem__(self, n: int) -> int:
        # 1-based
        if not 1 <= n <= len(self._bits):
            raise IndexError(n)
        self.reads += 1
        self.max_read = max(self.max_read, n)
        return int(self._bits[n - 1])


class PrefixOracle:
    """Serves digits of a fixed real and meters the deepest digit requested."""

    def __init__(self, value: Dyadic):
        self.value = Dyadic.coerce(value)
        self.max_digit = 0

    def digit(self, i: int) -> int:
        self.max_digit = max(self.max_digit, i)
        return _digit(self.value, i)

    def prefix(self, m: int) -> int:
        """``floor(x * 2^m)``; charged as a read of digits ``1..m``."""
        self.max_digit = max(self.max_digit, m)
        return prefix(self.value, m)


def decode_real(x: CodedSet | MeteredBits, a: ApproxSequence, n: int) -> int:
    """Recover the ``n``-digit prefix of ``a``'s limit from its coded set.

    Reads the block counts for digits ``1..n`` (bits ``1..2^n - 1``), replays
    ``a`` until every digit has flipped up that many times, and returns the
    prefix at that stage.  Past that stage the prefix can no longer change.
    """
    _below_one(a)
    reader = x if isinstance(x, MeteredBits) else MeteredBits(x.bits)
    want = []
    for i in range(1, n + 1):
        start = 1 << (i - 1)
        p = 0
        while p < start and reader[start + p] == 1:
            p += 1
        want.append(p)
    have = [0] * n
    for s in range(len(a)):
        if s:
            rose = ~prefix(a[s - 1], n) & prefix(a[s], n)
            for i in range(1, n + 1):
                if (rose >> (n - i)) & 1:
                    have[i - 1] += 1
        if any(h > w for h, w in zip(have, want)):
            raise DecodeError(f"stage {s} flips more often than the coded counts allow")
        if have == want:
            found = prefix(a[s], n)
            for later in a.values[s + 1 :]:
                if prefix(later, n) != found:
                    raise AssertionError("prefix moved after its flip counts were exhausted")
            return found
    raise DecodeError("coded flip counts are never reached by the approximation")


def set_from_real(oracle: PrefixOracle, a: ApproxSequence, n: int) -> int:
    """Bit ``n`` (1-based) of the coded set using oracle digits ``1..floor(log2 n)+1``."""
    _below_one(a)
    i, offset = block_of(n)
    target = oracle.prefix(i)
    count, prev = 0, None
    for p in (prefix(v, i) for v in a.values):
        if prev is not None and ~prev & p & 1:
            count += 1
        if p == target:
            return 1 if offset < count else 0
        prev = p
    raise DecodeError(f"oracle prefix of length {i} never appears in the approximation")
