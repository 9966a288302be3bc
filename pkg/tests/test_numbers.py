import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fracdim.errors import ConfigError, NumberModeError
from fracdim.numbers import EXACT, FLOAT, coerce, log2, mode_of, parse_number
from fracdim.roots import bisect_newton


def test_parse_number():
    assert parse_number("1/3") == F(1, 3)
    assert parse_number(" -2/6 ") == F(-1, 3)
    assert parse_number("0.05") == F(1, 20)
    assert parse_number("3") == 3
    for bad in ("1/0", "abc", "1/x", ""):
        with pytest.raises(ConfigError):
            parse_number(bad, "line 1, column 1")


def test_modes():
    assert mode_of(F(1, 3)) == EXACT and mode_of(2) == EXACT
    assert mode_of(0.5) == FLOAT
    with pytest.raises(NumberModeError):
        coerce(0.5, EXACT)


@given(st.integers(1, 10**30), st.integers(1, 10**30))
def test_exact_log2_handles_huge_rationals(a, b):
    x = F(a, b)
    assert math.isclose(log2(x), math.log2(a) - math.log2(b), abs_tol=1e-9)


def test_log2_tiny_fraction():
    assert log2(F(1, 2 ** 2000)) == -2000


def test_bisect_newton():
    root = bisect_newton(lambda x: x * x - 2, lambda x: 2 * x, 0.0, 2.0)
    assert abs(root - math.sqrt(2)) < 1e-13
    with pytest.raises(ValueError):
        bisect_newton(lambda x: x * x + 1, lambda x: 2 * x, 0.0, 2.0)
