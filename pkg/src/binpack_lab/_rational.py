"""Small helpers for exact rationals: parsing, formatting, decimal rendering."""
from __future__ import annotations

import decimal
import re
from fractions import Fraction
from math import lcm

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class RationalParseError(ValueError):
    """Raised for text that is not a well-formed ``p/q`` rational."""


def parse_rational(text: str) -> tuple[Fraction, bool]:
    """Parse ``p/q`` (or a bare integer) exactly.

    Returns the value and a flag telling whether the text was already in
    lowest terms. Decimals are rejected on purpose.
    """
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise RationalParseError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalParseError(f"zero denominator in {text!r}")
    value = Fraction(num, den)
    reduced = value.numerator == num and value.denominator == den
    return value, reduced


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)[0]
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def fmt(x: Fraction) -> str:
    """``num/den`` with the denominator always shown."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def to_decimal(x: Fraction, digits: int = 16) -> str:
    """Render ``x`` with ``digits`` significant digits, correctly rounded."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = decimal.ROUND_HALF_EVEN
        return str(decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator))


def common_scale(values) -> int:
    """Least common denominator of a collection of rationals."""
    scale = 1
    for v in values:
        scale = lcm(scale, v.denominator)
    return scale
