import math
import unittest
from fractions import Fraction

import numpy as np

from contractlab.core.numeric import (
    approx_eq,
    approx_le,
    divide,
    format_number,
    int_array,
    lcm_denominator,
    parse_number,
    safe_mul,
    safe_sub,
)


class TestParseNumber(unittest.TestCase):

    def test_decimals_are_exact(self):
        assert parse_number("0.3") == Fraction(3, 10)
        assert parse_number(0.3) == Fraction(3, 10)
        assert parse_number("7/11") == Fraction(7, 11)
        assert parse_number(2) == 2

    def test_real_mode(self):
        assert parse_number("1/4", exact=False) == 0.25
        assert isinstance(parse_number(3, exact=False), float)

    def test_infinities(self):
        assert parse_number("inf") == math.inf
        assert parse_number("-inf") == -math.inf

    def test_rejects_non_numbers(self):
        for value in ("abc", "1/0", True, None, [1]):
            with self.assertRaises(ValueError):
                parse_number(value)


class TestFormatting(unittest.TestCase):

    def test_format_number(self):
        assert format_number(Fraction(12, 25)) == "12/25"
        assert format_number(Fraction(4, 2)) == "2"
        assert format_number(math.inf) == "inf"
        assert format_number(-math.inf) == "-inf"
        assert format_number(0.5) == 0.5

    def test_lcm_denominator(self):
        assert lcm_denominator([Fraction(1, 4), Fraction(5, 6), 3]) == 12
        assert lcm_denominator([]) == 1


class TestComparisons(unittest.TestCase):

    def test_exact_comparisons_have_no_slack(self):
        assert approx_le(Fraction(1, 3), Fraction(1, 3))
        assert not approx_le(Fraction(1, 3) + Fraction(1, 10 ** 12), Fraction(1, 3))
        assert not approx_eq(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10 ** 12))

    def test_real_comparisons_use_tolerance(self):
        assert approx_le(1.0 + 1e-12, 1.0)
        assert approx_eq(0.1 + 0.2, 0.3)
        assert approx_eq(math.inf, math.inf)
        assert not approx_eq(math.inf, 1e300)

    def test_divide_keeps_the_mode(self):
        assert divide(1, 3) == Fraction(1, 3)
        assert isinstance(divide(1.0, 4), float)


class TestIntegerArrays(unittest.TestCase):

    def test_large_values_switch_to_python_ints(self):
        assert int_array([1, 2]).dtype == np.int64
        assert int_array([2 ** 63]).dtype == object

    def test_overflow_is_avoided(self):
        big = np.array([2 ** 61], dtype=np.int64)
        assert int(safe_mul(big, 4)[0]) == 2 ** 63
        assert int(safe_sub(big, -big)[0]) == 2 ** 62
