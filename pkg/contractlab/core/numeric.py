"""
Dual-mode number helpers.

Rational mode keeps every value as a ``fractions.Fraction``; real mode uses floats
compared with the configured absolute tolerance. Value tables store rational data as
integer numerators over one shared denominator so that numpy can compare them exactly.
"""
import math
import numbers
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from ..config.settings import settings

Number = Union[int, Fraction, float]

# Largest magnitude kept in int64 arrays before switching to Python ints.
INT64_SAFE = 1 << 62


def is_exact(value) -> bool:
    """True for integers and rationals, numpy integers included (bools excluded)."""
    return isinstance(value, numbers.Rational) and not isinstance(value, (bool, np.bool_))


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    return Fraction(value)


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def parse_number(value, exact: bool = True) -> Number:
    """
    Convert a JSON-ish number into the requested mode.

    Args:
        value: int, float, Fraction, or a string such as "3/10", "0.3" or "inf"
        exact: return a Fraction when True, a float otherwise

    Returns:
        Number: the parsed value

    Raises:
        ValueError: if the value is not a number
    """
    if isinstance(value, bool) or value is None:
        raise ValueError(f"Not a number: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "+inf", "infinity"):
            return math.inf
        if text.lower() in ("-inf", "-infinity"):
            return -math.inf
        try:
            parsed = Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a number: {value!r}") from e
        return parsed if exact else float(parsed)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return value
        # repr keeps the shortest decimal that round-trips, so 0.3 becomes 3/10
        return Fraction(repr(value)) if exact else value
    if is_exact(value):
        return to_fraction(value) if exact else float(value)
    raise ValueError(f"Not a number: {value!r}")


def to_real(value: Number) -> float:
    return float(value)


def exact_or_float(value: Number) -> Number:
    """Fractions for exact inputs (ints promoted), floats otherwise."""
    return to_fraction(value) if is_exact(value) else float(value)


def divide(a: Number, b: Number) -> Number:
    if is_exact(a) and is_exact(b):
        return to_fraction(a) / to_fraction(b)
    return float(a) / float(b)


def approx_le(a: Number, b: Number, tol: Optional[float] = None) -> bool:
    """a <= b exactly for rationals, within tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a <= b
    tol = settings.tolerance if tol is None else tol
    return float(a) <= float(b) + tol


def approx_eq(a: Number, b: Number, tol: Optional[float] = None) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    if math.isinf(float(a)) or math.isinf(float(b)):
        return float(a) == float(b)
    tol = settings.tolerance if tol is None else tol
    return abs(float(a) - float(b)) <= tol


def format_number(value: Number) -> Union[str, float]:
    """JSON form: "p/q" (or "p") for rationals, floats for reals, "inf"/"-inf" for infinities."""
    if is_exact(value):
        fraction = to_fraction(value)
        if fraction.denominator == 1:
            return str(fraction.numerator)
        return f"{fraction.numerator}/{fraction.denominator}"
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def lcm_denominator(values: Iterable[Number]) -> int:
    """Least common denominator of a collection of rationals."""
    denominator = 1
    for v in values:
        denominator = math.lcm(denominator, to_fraction(v).denominator)
    return denominator


def int_array(values) -> np.ndarray:
    """int64 array when every entry is small enough, object array of Python ints otherwise."""
    values = [int(v) for v in values]
    if not values or max(abs(v) for v in values) < INT64_SAFE:
        return np.array(values, dtype=np.int64)
    return np.array(values, dtype=object)


def _max_abs(array: np.ndarray) -> int:
    if array.size == 0:
        return 0
    return int(max(abs(int(array.max())), abs(int(array.min()))))


def safe_mul(array: np.ndarray, factor: int) -> np.ndarray:
    """Multiply an integer array by an int without silent int64 overflow."""
    factor = int(factor)
    if array.dtype == object:
        return array * factor
    if _max_abs(array) * abs(factor) < INT64_SAFE:
        return array * factor
    return array.astype(object) * factor


def safe_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Subtract integer arrays without silent int64 overflow."""
    if a.dtype == object or b.dtype == object:
        return a.astype(object) - b.astype(object)
    if _max_abs(a) + _max_abs(b) < INT64_SAFE:
        return a - b
    return a.astype(object) - b.astype(object)


def safe_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == object or b.dtype == object:
        return a.astype(object) + b.astype(object)
    if _max_abs(a) + _max_abs(b) < INT64_SAFE:
        return a + b
    return a.astype(object) + b.astype(object)
