"""Exact rational scalars and vectors with a bit-length size measure.

The substrate for every other module. Scalars are ``fractions.Fraction``
(exact arithmetic, always in lowest terms, positive denominator); vectors
are plain tuples of Fractions. The one piece of domain logic added here is
the bit-length measure: for a rational p/q in lowest terms,

    bitlen(p/q) = bits(|p|) + bits(q)

where bits(0) = 1 and bits(m) = floor(log2 m) + 1 for m >= 1. The sign
carries no bits. The minimum bit-length of any rational is therefore 2,
and bitlen(q) == bitlen(-q).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Fraction
RVec = tuple[Fraction, ...]

RatLike = Union[Fraction, int, str]


class DimensionMismatch(ValueError):
    """An operation received vectors or matrices of incompatible dimensions."""


class CapExceeded(RuntimeError):
    """An enumeration was refused because it would exceed a configured cap.

    Carries the computed size so refusals can name the offending count.
    """

    def __init__(self, message: str, count: int):
        super().__init__(f"{message} (computed size {count})")
        self.count = count


def bitlen_int(m: int) -> int:
    """Bits of a nonnegative integer: bits(0) = 1, else floor(log2 m) + 1."""
    if m < 0:
        raise ValueError(f"bitlen_int expects a nonnegative integer, got {m}")
    return 1 if m == 0 else m.bit_length()


def bitlen_rat(q: Rat) -> int:
    """Bit-length of a rational in lowest terms; no sign bit; minimum 2."""
    return bitlen_int(abs(q.numerator)) + bitlen_int(q.denominator)


def bitlen_vec(v: Sequence[Rat]) -> int:
    return sum(bitlen_rat(x) for x in v)


_RAT_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rat(text: str) -> Rat:
    """Parse the strict literal format ``p`` or ``p/q`` (optional leading -).

    Rejects q = 0, internal whitespace, and anything else nonconforming.
    """
    m = _RAT_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in rational literal: {text!r}")
    return Fraction(num, den)


def format_rat(q: Rat) -> str:
    """Inverse of parse_rat: ``p`` for integers, ``p/q`` otherwise."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_rat(value: RatLike) -> Rat:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def as_vec(values: Iterable[RatLike]) -> RVec:
    return tuple(as_rat(v) for v in values)


def format_vec(v: Sequence[Rat]) -> list[str]:
    return [format_rat(x) for x in v]


def rat_compare(a: Rat, b: Rat) -> int:
    """Total order: -1, 0, or 1. Equivalent to exact cross-multiplication."""
    if a < b:
        return -1
    return 1 if a > b else 0


def rat_arith(op: str, a: Rat, b: Rat | None = None):
    """Dispatch for the basic exact operations.

    ``neg`` is unary; the rest take two operands. Results are Fractions in
    lowest terms (``compare`` returns an int ordering). Division is not
    exposed: nothing in the lab divides by a runtime value except mean's
    division by the multiset size, which the aggregation module owns.
    """
    if op == "neg":
        if b is not None:
            raise ValueError("neg is unary")
        return -a
    if b is None:
        raise ValueError(f"{op} needs two operands")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "max":
        return b if b > a else a
    if op == "compare":
        return rat_compare(a, b)
    raise ValueError(f"unknown operation {op!r}")


def check_dim(v: Sequence[Rat], expected: int, what: str = "vector") -> None:
    if len(v) != expected:
        raise DimensionMismatch(f"{what} has dimension {len(v)}, expected {expected}")
