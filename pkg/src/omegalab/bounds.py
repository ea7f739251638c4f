"""Truncation, truncated sums and their lower-bound check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .dyadic import ONE, ZERO, Dyadic, prefix
from .usefn import Signature

__all__ = ["truncate", "greedy_coefficients", "TruncatedSums", "truncated_sums", "LowerBoundReport", "lower_bound_report"]


def greedy_coefficients(x: Dyadic, constants: Sequence[int], upto: int | None = None) -> list[int]:
    """Coefficients ``n_i`` of ``x = sum n_i 2^-c_i + r`` with ``n_{i+1} 2^-c_{i+1} < 2^-c_i``."""
    if any(a >= b for a, b in zip(constants, constants[1:])):
        raise ValueError("constants must be strictly increasing")
    last = len(constants) - 1 if upto is None else upto
    coeffs = []
    rest = x
    for c in constants[: last + 1]:
        n = prefix(rest, c)
        coeffs.append(n)
        rest = rest - Dyadic(n, c)
    return coeffs


def truncate(x: Dyadic, t: int, constants: Sequence[int]) -> Dyadic:
    """``T(x, c_t)``: the part of ``x`` made of multiples of ``2^-c_0 .. 2^-c_t``."""
    if not 0 <= t < len(constants):
        raise IndexError(f"t = {t} outside constants of length {len(constants)}")
    total = ZERO
    for n, c in zip(greedy_coefficients(x, constants, t), constants):
        total = total + Dyadic(n, c)
    return total


@dataclass(frozen=True)
class TruncatedSums:
    k: int
    values: tuple[Dyadic, ...]

    def __getitem__(self, i: int) -> Dyadic:
        # S_k(-1) is 0 by convention
        if i == -1:
            return ZERO
        if not 0 <= i < self.k:
            raise IndexError(f"S_{self.k}({i}) undefined; need 0 <= i < {self.k}")
        return self.values[i]


def truncated_sums(sig: Signature, k: int) -> TruncatedSums:
    """``S_k(0) = T(|I_k| 2^-c_k, c_{k-1})``, ``S_k(i) = T(|I_{k-i}| 2^-c_{k-i} + S_k(i-1), c_{k-i-1})``."""
    if not 0 <= k < len(sig):
        raise IndexError(f"k = {k} outside signature of length {len(sig)}")
    cs = sig.constants
    vals: list[Dyadic] = []
    prev = ZERO
    for i in range(k):
        prev = truncate(sig.weight(k - i) + prev, k - i - 1, cs)
        vals.append(prev)
    return TruncatedSums(k, tuple(vals))


@dataclass(frozen=True)
class LowerBoundReport:
    k: int
    t: int
    truncated: Dyadic
    raw_sum: Dyadic
    holds: bool
    # S_k(t) + 1 - raw_sum when the bound holds
    slack: Dyadic | None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "S": str(self.truncated),
            "raw_sum": str(self.raw_sum),
            "holds": self.holds,
            "slack": None if self.slack is None else str(self.slack),
        }


def lower_bound_report(sig: Signature, k: int, t: int) -> LowerBoundReport:
    """Check ``S_k(t) >= sum_{i<=t} |I_{k-i}| 2^-c_{k-i} - 1``."""
    if not 0 <= t < k:
        raise IndexError(f"need 0 <= t < k, got t = {t}, k = {k}")
    s = truncated_sums(sig, k)[t]
    raw = ZERO
    for i in range(t + 1):
        raw = raw + sig.weight(k - i)
    holds = s + ONE >= raw
    return LowerBoundReport(k, t, s, raw, holds, (s + ONE) - raw if holds else None)
