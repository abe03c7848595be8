"""Parsing and formatting of exact rationals as ``"p/q"`` strings."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .errors import DataError

ExtRational = Union[Fraction, float]
"""A rational number, or ``math.inf`` for an infinite measure."""

INF = math.inf

_RATIONAL_RE = re.compile(r"^\s*-?\d+\s*(/\s*\d+\s*)?$")


def parse_rational(value: object, field: str | None = None) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction.

    Floats and decimal strings are rejected so that serialized data stays exact.
    """
    if isinstance(value, bool):
        raise DataError(f"expected a rational, got {value!r}", field)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str) and _RATIONAL_RE.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise DataError(f"zero denominator in {value!r}", field) from None
    raise DataError(f"expected a decimal-free rational like '3/4', got {value!r}", field)


def format_rational(value: Fraction | int) -> str:
    """Format as ``"p/q"`` (or ``"p"`` when the denominator is 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_ext(value: ExtRational) -> str:
    if value == INF:
        return "inf"
    return format_rational(value)
