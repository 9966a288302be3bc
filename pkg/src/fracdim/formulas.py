"""Closed-form dimension predictions.

Formulas take precomputed entropies and Lyapunov exponents (bits), so they
apply to any invariant measure whose ``h`` and ``chi`` are known.
Hypothesis flags are ``True``/``False`` when decided and ``None`` when
unknown; a prediction is always returned, with warnings for flags that
are not ``True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CrossCheckError, DomainError
from .ifs import IFS1D
from .numbers import log2 as exact_log2
from .roots import bisect_newton

MAX_EXPONENT = 64


@dataclass
class DimensionReport:
    name: str
    predicted: float
    inputs: dict = field(default_factory=dict)
    hypothesis_flags: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def warnings(self) -> list[str]:
        out = []
        for k, v in self.hypothesis_flags.items():
            if v is None:
                out.append(f"hypothesis '{k}' is unknown")
            elif v is False:
                out.append(f"hypothesis '{k}' failed")
        return out


def projection_dimension(h: float, chi: float) -> float:
    """``min(1, h / -chi)``."""
    if not chi < 0:
        raise DomainError(f"Lyapunov exponent must be negative, got {chi}")
    if h < 0:
        raise DomainError(f"entropy must be nonnegative, got {h}")
    return min(1.0, h / -chi)


def similarity_dimension(ifs: IFS1D) -> float:
    """Root ``s`` of ``sum |r_k|^s = 1``."""
    logs = [exact_log2(abs(r)) for r in ifs.ratios]
    n = len(logs)
    if n == 1:
        return 0.0
    if len(set(logs)) == 1:
        return math.log2(n) / -logs[0]

    def f(s):
        return math.fsum(2.0 ** (s * lr) for lr in logs) - 1.0

    def df(s):
        return math.fsum(lr * math.log(2) * 2.0 ** (s * lr) for lr in logs)

    hi = math.log2(n) / -max(logs)
    return bisect_newton(f, df, 0.0, hi, xtol=1e-15)


@dataclass(frozen=True)
class Dependence:
    """Outcome of the bounded search for ``r1**a == r2**b``.

    ``independent`` is ``False`` with the minimal ``(a, b)`` when a relation
    was found, ``True`` when none exists with ``max(a, b) <= bound``, and
    ``None`` when the inputs are not rational.
    """

    independent: bool | None
    a: int | None = None
    b: int | None = None
    bound: int = MAX_EXPONENT


def multiplicative_dependence(r1, r2, bound: int = MAX_EXPONENT) -> Dependence:
    if isinstance(r1, float) or isinstance(r2, float):
        return Dependence(None, bound=bound)
    r1, r2 = Fraction(r1), Fraction(r2)
    if not (0 < r1 < 1 and 0 < r2 < 1):
        raise DomainError("ratios must lie in (0, 1)")
    ratio = math.log(r1) / math.log(r2)
    for a in range(1, bound + 1):
        b0 = round(a * ratio)
        for b in (b0 - 1, b0, b0 + 1):
            if 1 <= b <= bound and r1 ** a == r2 ** b:
                return Dependence(False, a, b, bound)
    return Dependence(True, bound=bound)


def convolution_dimension(h1: float, r1, h2: float, r2, separation: bool | None = None) -> DimensionReport:
    """``min(1, h1/-log r1 + h2/-log r2)`` with the independence flag attached."""
    l1, l2 = exact_log2(r1), exact_log2(r2)
    if not (l1 < 0 and l2 < 0):
        raise DomainError("ratios must lie in (0, 1)")
    if h1 < 0 or h2 < 0:
        raise DomainError("entropies must be nonnegative")
    dep = multiplicative_dependence(r1, r2)
    value = min(1.0, h1 / -l1 + h2 / -l2)
    return DimensionReport(
        name="convolution",
        predicted=value,
        inputs={"h1": h1, "r1": r1, "h2": h2, "r2": r2},
        hypothesis_flags={
            "multiplicative_independence": dep.independent,
            "joint_exponential_separation": separation,
        },
        details={"dependence": dep},
    )


def orthogonal_projection_dimension(h: float, r) -> float:
    """Projection of a rotation-similar planar measure: ``min(1, h / -log r)``."""
    lr = exact_log2(r)
    if not lr < 0:
        raise DomainError("ratio must lie in (0, 1)")
    return projection_dimension(h, lr)


def lyapunov_dimension_diagonal(h: float, chi1: float, chi2: float,
                                finite_to_one: bool | None = None) -> DimensionReport:
    """``min(h/chi1, 1 + (h - chi1)/chi2)`` for positive exponents ``chi1 <= chi2``.

    Also evaluates ``h_p/chi1 + (h - h_p)/chi2`` with ``h_p = min(h, chi1)``
    and checks both forms agree to 1e-12. ``finite_to_one`` is the
    caller's claim about the coding map; it is reported, not verified.
    """
    if not 0 < chi1 <= chi2:
        raise DomainError(f"need 0 < chi1 <= chi2, got chi1={chi1}, chi2={chi2}")
    if h < 0:
        raise DomainError("entropy must be nonnegative")
    value = min(h / chi1, 1 + (h - chi1) / chi2)
    h_proj = min(h, chi1)
    fh = h_proj / chi1 + (h - h_proj) / chi2
    if abs(fh - value) > 1e-12:
        raise CrossCheckError(f"Lyapunov dimension forms disagree: {value!r} vs {fh!r}")
    return DimensionReport(
        name="lyapunov_diagonal",
        predicted=value,
        inputs={"h": h, "chi1": chi1, "chi2": chi2},
        hypothesis_flags={"exponential_separation_weak_direction": None, "coding_finite_to_one": finite_to_one},
        details={"branch": "h<=chi1" if h <= chi1 else "h>chi1", "feng_hu": fh, "projected_entropy": h_proj},
    )


def lq_lower_bound(h: float, chi: float, s: float, alpha_min: float) -> DimensionReport:
    """``max(0, h/-chi - (s - alpha_min))`` next to the upper value ``min(1, h/-chi)``."""
    if not chi < 0:
        raise DomainError("Lyapunov exponent must be negative")
    if s < alpha_min:
        raise DomainError(f"similarity dimension {s} is below alpha_min {alpha_min}")
    ratio = h / -chi
    if ratio > s + 1e-12:
        raise DomainError(f"h/-chi = {ratio} exceeds the similarity dimension {s}")
    lower = max(0.0, ratio - (s - alpha_min))
    upper = projection_dimension(h, chi)
    return DimensionReport(
        name="lq_lower_bound",
        predicted=lower,
        inputs={"h": h, "chi": chi, "s": s, "alpha_min": alpha_min},
        details={"upper": upper},
    )
