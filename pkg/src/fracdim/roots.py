"""Bracketed root finding for monotone scalar functions."""

from __future__ import annotations

import math


def bisect_newton(f, df, lo: float, hi: float, xtol: float = 1e-13, maxiter: int = 400) -> float:
    """Root of a monotone ``f`` on ``[lo, hi]``: bisection, then one Newton step.

    ``f(lo)`` and ``f(hi)`` must have opposite signs (or one be zero). The
    Newton step is kept only if it stays inside the final bracket and does
    not increase ``|f|``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = lo if abs(flo) <= abs(fhi) else hi
    fx = flo if x == lo else fhi
    d = df(x)
    if d and math.isfinite(d):
        xn = x - fx / d
        if lo <= xn <= hi:
            fn = f(xn)
            if abs(fn) <= abs(fx):
                return xn
    return x
