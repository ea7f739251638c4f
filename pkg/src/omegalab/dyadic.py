"""Exact nonnegative dyadic rationals and bit-level prefix operations.

Digit ``i >= 1`` of a value carries weight ``2**-i``.  The prefix of length
``m`` is ``floor(x * 2**m)``, so it includes any integer part.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

__all__ = [
    "Dyadic",
    "INTEGER_PART",
    "ZERO",
    "ONE",
    "add",
    "prefix",
    "leftmost_change",
    "least_increment",
    "next_change",
    "bits",
    "first_digit_difference",
]

# Returned by leftmost_change when the integer parts already differ.
INTEGER_PART = 0

_TEXT_RE = re.compile(r"^\s*(0x[0-9a-fA-F]+|\d+)\s*(?:/\s*2\^(\d+)|/\s*(\d+))?\s*$")
# mantissas longer than this print in hex (decimal conversion of huge ints is capped)
_HEX_BITS = 4096
_BIN_RE = re.compile(r"^\s*(\d+)\.([01]*)\s*$")


_new = object.__new__


class Dyadic:
    """The value ``mantissa * 2**-scale``, always kept in canonical form.

    Immutable and hashable; equal values have equal fields.
    """

    __slots__ = ("mantissa", "scale")
    mantissa: int
    scale: int

    def __init__(self, mantissa: int, scale: int = 0) -> None:
        m, s = mantissa, scale
        if type(m) is not int or type(s) is not int:
            if not isinstance(m, int) or not isinstance(s, int) or isinstance(m, bool):
                raise TypeError("mantissa and scale must be integers")
            m, s = int(m), int(s)
        if m < 0:
            raise ValueError(f"negative dyadic: {m}/2^{s}")
        if s < 0:
            m, s = m << -s, 0
        if m == 0:
            s = 0
        elif s and not m & 1:
            shift = min((m & -m).bit_length() - 1, s)
            m, s = m >> shift, s - shift
        _SET_M(self, m)
        _SET_S(self, s)

    @classmethod
    def _make(cls, m: int, s: int) -> "Dyadic":
        """Trusted constructor for nonnegative ints ``m`` and ``s``; skips the type checks."""
        if m == 0:
            s = 0
        elif s and not m & 1:
            shift = (m & -m).bit_length() - 1
            if shift > s:
                shift = s
            m, s = m >> shift, s - shift
        obj = _new(cls)
        _SET_M(obj, m)
        _SET_S(obj, s)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    def __delattr__(self, name):
        raise AttributeError("Dyadic is immutable")

    def __reduce__(self):
        return (Dyadic, (self.mantissa, self.scale))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.scale == other.scale
        if isinstance(other, int) and not isinstance(other, bool):
            return self.scale == 0 and self.mantissa == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.mantissa, self.scale))

    # construction ---------------------------------------------------------

    @classmethod
    def pow2(cls, exponent: int) -> "Dyadic":
        """``2**exponent`` for any integer exponent."""
        if exponent >= 0:
            return cls(1 << exponent, 0)
        return cls(1, -exponent)

    @classmethod
    def coerce(cls, value: Union["Dyadic", int, Fraction, str]) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a dyadic")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not dyadic")
            return cls(value.numerator, den.bit_length() - 1)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot make a Dyadic from {type(value).__name__}")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Accept ``"m"``, ``"m/2^s"``, ``"m/d"`` (d a power of two) or ``"0.b1b2..."``."""
        mb = _BIN_RE.match(text)
        if mb:
            whole, frac = mb.groups()
            return cls((int(whole) << len(frac)) + (int(frac, 2) if frac else 0), len(frac))
        mt = _TEXT_RE.match(text)
        if not mt:
            raise ValueError(f"not a dyadic literal: {text!r}")
        num, exp, den = mt.groups()
        m = int(num, 16) if num[:2].lower() == "0x" else int(num)
        if exp is not None:
            return cls(m, int(exp))
        if den is not None:
            return cls.coerce(Fraction(m, int(den)))
        return cls(m, 0)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: object) -> "Dyadic":
        if isinstance(other, int) and not isinstance(other, bool):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b = self.scale, other.scale
        s = a if a > b else b
        return Dyadic._make((self.mantissa << (s - a)) + (other.mantissa << (s - b)), s)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Dyadic":
        if isinstance(other, int) and not isinstance(other, bool):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        s = max(self.scale, other.scale)
        diff = (self.mantissa << (s - self.scale)) - (other.mantissa << (s - other.scale))
        if diff < 0:
            raise ValueError(f"{self} - {other} is negative")
        return Dyadic._make(diff, s)

    def __mul__(self, other: object) -> "Dyadic":
        if isinstance(other, int) and not isinstance(other, bool):
            return Dyadic(self.mantissa * other, self.scale)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.scale + other.scale)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k`` (``k`` may be negative)."""
        return Dyadic(self.mantissa, self.scale - k)

    def floor(self) -> int:
        return self.mantissa >> self.scale

    # comparison -----------------------------------------------------------

    def _cmp_key(self, other: "Dyadic") -> tuple[int, int]:
        s = max(self.scale, other.scale)
        return self.mantissa << (s - self.scale), other.mantissa << (s - other.scale)

    def __lt__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(Dyadic.coerce(other))
        return a < b

    def __le__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(Dyadic.coerce(other))
        return a <= b

    def __gt__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(Dyadic.coerce(other))
        return a > b

    def __ge__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(Dyadic.coerce(other))
        return a >= b

    def __bool__(self) -> bool:
        return self.mantissa != 0

    # rendering ------------------------------------------------------------

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale)

    def binary(self, digits: int | None = None) -> str:
        """Binary expansion ``"w.b1b2..."``; exact unless ``digits`` truncates it."""
        n = self.scale if digits is None else digits
        p = prefix(self, n)
        whole = p >> n
        frac = format(p & ((1 << n) - 1), f"0{n}b") if n else ""
        return f"{whole}.{frac}" if frac else f"{whole}.0"

    def __str__(self) -> str:
        m = hex(self.mantissa) if self.mantissa.bit_length() > _HEX_BITS else str(self.mantissa)
        return m if self.scale == 0 else f"{m}/2^{self.scale}"

    def __repr__(self) -> str:
        return f"Dyadic({self})"

    def __float__(self) -> float:
        return float(self.to_fraction())


_SET_M = Dyadic.__dict__["mantissa"].__set__
_SET_S = Dyadic.__dict__["scale"].__set__

ZERO = Dyadic(0)
ONE = Dyadic(1)


def add(a: Dyadic, b: Dyadic) -> Dyadic:
    return a + b


def prefix(x: Dyadic, m: int) -> int:
    """``floor(x * 2**m)``."""
    if m < 0:
        raise ValueError("prefix length must be >= 0")
    if m >= x.scale:
        return x.mantissa << (m - x.scale)
    return x.mantissa >> (x.scale - m)


def bits(x: Dyadic, m: int) -> str:
    """The first ``m`` fractional digits of ``x`` as a bit string (integer part dropped)."""
    if m == 0:
        return ""
    return format(prefix(x, m) & ((1 << m) - 1), f"0{m}b")


def leftmost_change(a: Dyadic, b: Dyadic) -> int:
    """Least ``m >= 1`` at which the prefixes of ``a`` and ``b`` differ.

    Returns ``INTEGER_PART`` when the integer parts already differ.
    """
    if a == b:
        raise ValueError("leftmost_change of equal values")
    if a.floor() != b.floor():
        return INTEGER_PART
    s = max(a.scale, b.scale)
    x = (a.mantissa << (s - a.scale)) ^ (b.mantissa << (s - b.scale))
    # highest differing bit sits at weight 2**(top - s)
    return s - (x.bit_length() - 1)


def first_digit_difference(x: Dyadic, y: Dyadic, lo: int, hi: int) -> int | None:
    """Least digit ``i`` in ``[lo, hi]`` where ``x`` and ``y`` differ, else ``None``.

    Never shifts past the finer of the two scales, so ``hi`` may be huge.
    """
    if lo < 1:
        raise ValueError("digits are numbered from 1")
    top = min(hi, max(x.scale, y.scale))
    if top < lo:
        return None
    diff = (prefix(x, top) ^ prefix(y, top)) & ((1 << (top - lo + 1)) - 1)
    if not diff:
        return None
    return top - (diff.bit_length() - 1)


def least_increment(x: Dyadic, m: int) -> Dyadic:
    """Least ``d > 0`` with ``prefix(x + d, m) != prefix(x, m)``."""
    return next_change(x, m) - x


def next_change(x: Dyadic, m: int) -> Dyadic:
    """``x + least_increment(x, m)``: the next multiple of ``2^-m`` above ``x``."""
    if m < 1:
        raise ValueError("demand length must be >= 1")
    return Dyadic(prefix(x, m) + 1, m)
