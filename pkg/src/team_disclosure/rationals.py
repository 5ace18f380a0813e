"""Exact rational arithmetic helpers.

All probability math in this package runs on ``fractions.Fraction``. Floats
are accepted at the boundary and converted by parsing their shortest decimal
representation, so ``0.51`` becomes exactly ``51/100`` rather than the nearest
binary float.
"""
from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction

Rational = Fraction | int | str | float


def as_fraction(value: Rational) -> Fraction:
    """Convert a number-like value to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # repr(float) is the shortest decimal string that round-trips,
        # so this reads 0.1 as 1/10, not as the binary expansion.
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def frac_str(value: Fraction) -> str:
    """Canonical string form, e.g. '1/3', '0', '2'."""
    return str(Fraction(value))


def decimal_str(value: Fraction, digits: int = 12) -> str:
    """Decimal rendering with a fixed number of significant digits."""
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        out = Decimal(value.numerator) / Decimal(value.denominator)
    return str(out)
