"""Exact rational values.

Every probability, game value, and bound in this package is a
``fractions.Fraction``; floating point never enters a value computation.
The wire format for a rational is the string ``"p/q"`` with ``q > 0``
(zero renders as ``"0/1"``).
"""

from __future__ import annotations

from fractions import Fraction

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or a plain integer string into a Fraction."""
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc
    return value


def format_rational(value: Fraction) -> str:
    """Render a Fraction as ``"p/q"``, always including the denominator."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"
