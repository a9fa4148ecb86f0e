"""Exact rationals: gmpy2's mpq when installed (several times faster), else Fraction."""
from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction


def to_q(x) -> "Q":
    if isinstance(x, Q):
        return x
    f = Fraction(x)
    return Q(f.numerator, f.denominator)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator))
