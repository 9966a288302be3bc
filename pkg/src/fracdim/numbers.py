"""Dual number mode: exact rationals or extended-precision binary floats.

Exact mode uses :class:`fractions.Fraction`. Float mode uses ``mpmath``
numbers from a private context with a 96-bit mantissa, so changing
``mpmath.mp.prec`` elsewhere has no effect here.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

from mpmath.ctx_mp import MPContext

from .errors import ConfigError, NumberModeError

EXACT = "exact"
FLOAT = "float"

FLOAT_PREC = 96
fctx = MPContext()
fctx.prec = FLOAT_PREC


def parse_number(text, position=None):
    """Parse ``"p/q"``, integer or decimal strings as exact rationals."""
    if not isinstance(text, str):
        raise ConfigError(f"expected a number string, got {text!r}", position)
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            den_v = Fraction(den.strip())
            num_v = Fraction(num.strip())
        else:
            return Fraction(s)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as a rational", position) from None
    if den_v == 0:
        raise ConfigError(f"zero denominator in {text!r}", position)
    return num_v / den_v


def mode_of(x) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Fraction)):
        return EXACT
    if isinstance(x, numbers.Rational):
        return EXACT
    return FLOAT


def coerce(x, mode: str):
    """Convert ``x`` into the representation used by ``mode``."""
    if mode == EXACT:
        if isinstance(x, str):
            return parse_number(x)
        if mode_of(x) != EXACT:
            raise NumberModeError(f"{x!r} is not an exact rational")
        return Fraction(x)
    if isinstance(x, str):
        return fctx.mpf(x)
    if isinstance(x, Fraction):
        return fctx.mpf(x.numerator) / x.denominator
    return fctx.mpf(x)


def common_mode(values) -> str:
    """Exact if every value is rational (or a rational string), else float."""
    for v in values:
        if isinstance(v, str):
            continue
        if mode_of(v) == FLOAT:
            return FLOAT
    return EXACT


def require_same_mode(*modes: str) -> str:
    first = modes[0]
    for m in modes[1:]:
        if m != first:
            raise NumberModeError(f"mixed number modes: {sorted(set(modes))}")
    return first


def log2(x) -> float:
    """Base-2 log of a positive Fraction/mpf/float, accurate for tiny values."""
    if isinstance(x, Fraction):
        if x <= 0:
            raise ValueError("log2 of non-positive number")
        # big-int safe: math.log2 accepts arbitrarily large ints
        return math.log2(x.numerator) - math.log2(x.denominator)
    if isinstance(x, int):
        return math.log2(x)
    return float(fctx.log(x, 2)) if not isinstance(x, float) else math.log2(x)


def to_float(x) -> float:
    return float(x)
