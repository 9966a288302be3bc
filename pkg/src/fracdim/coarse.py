"""Coarse-grained Bernoulli measures on length-m blocks.

Given an invariant measure ``mu`` with entropy ``h`` and Lyapunov exponent
``chi``, the good words of length ``m`` are those with

    2^{-m(h+delta)} <= mu[w] <= 2^{-m(h-delta)}   and   |r_w| >= 2^{m(chi-delta)}

(the ``homogeneous`` variant keeps only the mass condition). Good words
keep their mass, all other words get mass ``2^{-m/epsilon}``, and the
whole vector is rescaled by ``c`` to sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CrossCheckError, DomainError
from .ifs import IFS1D, level_maps
from .measures import Bernoulli, SymbolicMeasure, entropy, lyapunov
from .numbers import log2 as exact_log2

FULL = "full"
HOMOGENEOUS = "homogeneous"
SLACK = 1e-12


@dataclass(frozen=True)
class CoarseGraining:
    m: int
    delta: object
    epsilon: object
    good_words: frozenset
    words: tuple  # all of Lambda^m, lexicographic; weights follow this order
    weights: tuple
    log2_weights: np.ndarray = field(repr=False, compare=False)
    normalizer: object
    good_mass: object
    entropy: float
    lyapunov: float
    n_symbols: int
    variant: str = FULL

    @property
    def good_mass_ok(self) -> bool:
        return self.good_mass > 1 - self.delta

    @property
    def epsilon_ok(self) -> bool:
        return 1 / self.epsilon > math.log2(self.n_symbols)

    @property
    def hypotheses_hold(self) -> bool:
        return self.good_mass_ok and self.epsilon_ok

    @property
    def c_in_bounds(self) -> bool:
        return Fraction(1, 2) <= self.normalizer <= 2

    def weight(self, w) -> object:
        return self.weights[self.words.index(tuple(w))]


def _level(mu: SymbolicMeasure, ifs: IFS1D, m: int, budget=None):
    if mu.n_symbols != len(ifs):
        raise DomainError(f"measure has {mu.n_symbols} symbols but the IFS has {len(ifs)} maps")
    if m < 1:
        raise DomainError("block length m must be >= 1")
    return level_maps(ifs, m, budget)


def _good(mu, level, m, delta, h, chi, variant):
    d = float(delta)
    lo, hi = -m * (h + d) - SLACK * m, -m * (h - d) + SLACK * m
    rmin = m * (chi - d) - SLACK * m
    good, masses = set(), []
    for w, g in level:
        mass = mu.cylinder_mass(w)
        masses.append(mass)
        if mass == 0:
            continue
        lm = exact_log2(mass) if not isinstance(mass, float) else math.log2(mass)
        if not lo <= lm <= hi:
            continue
        if variant == FULL and exact_log2(abs(g.ratio)) < rmin:
            continue
        good.add(w)
    return good, masses


def good_words(mu: SymbolicMeasure, ifs: IFS1D, m: int, delta, variant: str = FULL, budget=None) -> frozenset:
    if not delta > 0:
        raise DomainError("delta must be positive")
    if variant not in (FULL, HOMOGENEOUS):
        raise DomainError(f"unknown variant {variant!r}")
    level = _level(mu, ifs, m, budget)
    good, _ = _good(mu, level, m, delta, entropy(mu), lyapunov(mu, ifs), variant)
    return frozenset(good)


def _bad_weight(m: int, epsilon):
    """``2^{-m/epsilon}`` exactly when ``m/epsilon`` is an integer."""
    e = Fraction(epsilon) if not isinstance(epsilon, float) else None
    if e is not None and (m / e).denominator == 1:
        return Fraction(1, 2 ** int(m / e)), -float(m / e)
    x = m / float(epsilon)
    return 2.0 ** -x, -x


def coarse_bernoulli(mu: SymbolicMeasure, ifs: IFS1D, m: int, delta, epsilon,
                     variant: str = FULL, budget=None) -> CoarseGraining:
    """Build the reweighted block vector and its normalizer.

    When ``good_mass > 1 - delta``, ``1/epsilon > log2 |Lambda|`` and
    ``delta <= 1/2`` the normalizer must lie in [1/2, 2]; a violation raises
    :class:`CrossCheckError`.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if not delta > 0:
        raise DomainError("delta must be positive")
    if variant not in (FULL, HOMOGENEOUS):
        raise DomainError(f"unknown variant {variant!r}")
    h, chi = entropy(mu), lyapunov(mu, ifs)
    level = _level(mu, ifs, m, budget)
    good, masses = _good(mu, level, m, delta, h, chi, variant)
    words = tuple(w for w, _ in level)

    bad, log_bad = _bad_weight(m, epsilon)
    exact = isinstance(bad, Fraction) and all(isinstance(x, Fraction) for x in masses)
    good_mass = sum((masses[i] for i, w in enumerate(words) if w in good), Fraction(0) if exact else 0.0)
    n_bad = len(words) - len(good)
    if exact:
        c = 1 / (good_mass + n_bad * bad)
    else:
        c = 1.0 / (float(good_mass) + n_bad * float(bad))
    raw = [masses[i] if w in good else bad for i, w in enumerate(words)]
    weights = tuple(x * c if exact else float(x) * c for x in raw)

    log_c = exact_log2(c) if exact else math.log2(c)
    log2_w = np.array([
        (exact_log2(masses[i]) if w in good else log_bad) + log_c for i, w in enumerate(words)
    ])

    cg = CoarseGraining(
        m=m, delta=delta, epsilon=epsilon, good_words=frozenset(good), words=words,
        weights=weights, log2_weights=log2_w, normalizer=c, good_mass=good_mass,
        entropy=h, lyapunov=chi, n_symbols=len(ifs), variant=variant,
    )
    if cg.hypotheses_hold and delta <= Fraction(1, 2) and not cg.c_in_bounds:
        raise CrossCheckError(f"normalizer {float(c)} outside [1/2, 2] although the hypotheses hold")
    return cg


def blocked_measure(cg: CoarseGraining) -> Bernoulli:
    """Bernoulli measure on the block alphabet; pair it with ``block_ifs(ifs, cg.m)``."""
    return Bernoulli(cg.weights)
