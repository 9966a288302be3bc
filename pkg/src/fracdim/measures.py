"""Shift-invariant measures on symbol space: Bernoulli and Markov.

Entropies and Lyapunov exponents are in bits. Probabilities may be
``Fraction`` (cylinder masses then stay exact) or floats.

Sampling uses numpy's Philox counter-based generator. Sample ``i`` of a
batch is generated from key ``(seed, stream, i // CHUNK)``, so it does not
depend on the batch size or on how the batch is split.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvalidWordError
from .ifs import IFS1D

CHUNK = 1 << 14
SUM_TOL = 1e-12


def _as_prob(x):
    if isinstance(x, str):
        from .numbers import parse_number
        return parse_number(x)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


def _is_exact(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _check_prob_vector(p, what="probability vector"):
    if len(p) == 0:
        raise DomainError(f"empty {what}")
    if any(v < 0 for v in p):
        raise DomainError(f"negative entry in {what}")
    total = sum(p)
    if _is_exact(p):
        if total != 1:
            raise DomainError(f"{what} sums to {total}, not 1")
    elif abs(float(total) - 1.0) > SUM_TOL:
        raise DomainError(f"{what} sums to {float(total)!r}, not 1")


class SymbolicMeasure:
    """Common interface; see :class:`Bernoulli` and :class:`Markov`."""

    n_symbols: int

    def symbol_marginal(self) -> tuple:
        raise NotImplementedError

    def cylinder_mass(self, w):
        raise NotImplementedError


@dataclass(frozen=True)
class Bernoulli(SymbolicMeasure):
    p: tuple

    def __post_init__(self):
        p = tuple(_as_prob(v) for v in self.p)
        _check_prob_vector(p)
        object.__setattr__(self, "p", p)

    @property
    def n_symbols(self) -> int:
        return len(self.p)

    @property
    def exact(self) -> bool:
        return _is_exact(self.p)

    def symbol_marginal(self) -> tuple:
        return self.p

    def cylinder_mass(self, w):
        w = _check_word(self, w)
        mass = Fraction(1) if self.exact else 1.0
        for s in w:
            mass *= self.p[s]
        return mass


@dataclass(frozen=True)
class Markov(SymbolicMeasure):
    """Stationary Markov measure; ``pi`` is solved from ``P`` when omitted."""

    P: tuple
    pi: tuple | None = None

    def __post_init__(self):
        P = tuple(tuple(_as_prob(v) for v in row) for row in self.P)
        n = len(P)
        if n == 0 or any(len(row) != n for row in P):
            raise DomainError("transition matrix must be square and nonempty")
        for i, row in enumerate(P):
            _check_prob_vector(row, f"row {i} of the transition matrix")
        object.__setattr__(self, "P", P)
        pi = stationary_distribution(P) if self.pi is None else tuple(_as_prob(v) for v in self.pi)
        _check_prob_vector(pi, "stationary vector")
        for j in range(n):
            lhs = sum(pi[i] * P[i][j] for i in range(n))
            if abs(float(lhs - pi[j])) > SUM_TOL:
                raise DomainError("pi is not stationary for P")
        object.__setattr__(self, "pi", pi)

    @property
    def n_symbols(self) -> int:
        return len(self.P)

    @property
    def exact(self) -> bool:
        return _is_exact(self.pi) and all(_is_exact(row) for row in self.P)

    def symbol_marginal(self) -> tuple:
        return self.pi

    def cylinder_mass(self, w):
        w = _check_word(self, w)
        if not w:
            return Fraction(1) if self.exact else 1.0
        mass = self.pi[w[0]]
        for a, b in zip(w, w[1:]):
            mass *= self.P[a][b]
        return mass


def _check_word(m: SymbolicMeasure, w):
    w = tuple(w)
    for i, s in enumerate(w):
        if isinstance(s, bool) or not isinstance(s, (int, np.integer)) or not 0 <= s < m.n_symbols:
            raise InvalidWordError(f"symbol {s!r} at position {i} is not in 0..{m.n_symbols - 1}")
    return w


def cylinder_mass(m: SymbolicMeasure, w):
    return m.cylinder_mass(w)


def _xlog2x(x) -> float:
    x = float(x)
    return x * math.log2(x) if x > 0 else 0.0


def entropy(m: SymbolicMeasure) -> float:
    """Entropy in bits; ``0 log 0`` is taken as 0."""
    if isinstance(m, Bernoulli):
        return -math.fsum(_xlog2x(v) for v in m.p)
    return -math.fsum(float(m.pi[i]) * _xlog2x(v) for i, row in enumerate(m.P) for v in row)


def lyapunov(m: SymbolicMeasure, ifs: IFS1D) -> float:
    """``sum_k mu[k] log2 |r_k|`` (negative)."""
    if m.n_symbols != len(ifs):
        raise DomainError(f"measure has {m.n_symbols} symbols but the IFS has {len(ifs)} maps")
    from .numbers import log2
    return math.fsum(float(w) * log2(abs(r)) for w, r in zip(m.symbol_marginal(), ifs.ratios) if w)


@dataclass(frozen=True)
class MeasureStats:
    entropy_bits: float
    lyapunov_bits: float


def measure_stats(m: SymbolicMeasure, ifs: IFS1D) -> MeasureStats:
    return MeasureStats(entropy(m), lyapunov(m, ifs))


def is_irreducible(P) -> bool:
    n = len(P)

    def reach(adj):
        seen, todo = {0}, deque([0])
        while todo:
            i = todo.popleft()
            for j in range(n):
                if adj(i, j) and j not in seen:
                    seen.add(j)
                    todo.append(j)
        return len(seen) == n

    return reach(lambda i, j: P[i][j] > 0) and reach(lambda i, j: P[j][i] > 0)


def stationary_distribution(P) -> tuple:
    """Stationary vector of an irreducible row-stochastic matrix.

    Uses Grassmann-Taksar-Heyman elimination: subtraction-free, so it is
    exact on ``Fraction`` input and stable in floating point.
    """
    P = [[_as_prob(v) for v in row] for row in P]
    n = len(P)
    if not is_irreducible(P):
        raise DomainError("transition matrix is reducible; an ergodic measure needs an irreducible chain")
    exact = all(_is_exact(row) for row in P)
    A = [[Fraction(v) if exact else float(v) for v in row] for row in P]
    for k in range(n - 1, 0, -1):
        s = sum(A[k][j] for j in range(k))
        for i in range(k):
            A[i][k] = A[i][k] / s
        for i in range(k):
            for j in range(k):
                A[i][j] += A[i][k] * A[k][j]
    pi = [Fraction(1) if exact else 1.0] + [None] * (n - 1)
    for k in range(1, n):
        pi[k] = sum(pi[i] * A[i][k] for i in range(k))
    total = sum(pi)
    pi = tuple(v / total for v in pi)
    if not exact:
        pi_arr = np.array(pi)
        resid = np.abs(pi_arr @ np.array(P, dtype=float) - pi_arr).max()
        if resid > SUM_TOL:
            raise DomainError(f"stationary solve residual {resid:.3g} exceeds {SUM_TOL}")
    return pi


# -- sampling ---------------------------------------------------------------

def philox(seed: int, stream: int, chunk: int = 0) -> np.random.Generator:
    """Counter-based generator for one ``(seed, stream, chunk)`` key."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, ((int(stream) & 0xFFFFFFFF) << 32) | (int(chunk) & 0xFFFFFFFF)]
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(seed: int, stream: int, count: int, width: int, start: int = 0) -> np.ndarray:
    """Rows ``start .. start+count`` of a U[0,1) array; row ``i`` depends only on ``i``."""
    out = np.empty((count, width))
    stop = start + count
    pos = start
    while pos < stop:
        chunk = pos // CHUNK
        base = chunk * CHUNK
        end = min(stop, base + CHUNK)
        # row-major fill: a short block is a prefix of the full chunk
        block = philox(seed, stream, chunk).random((end - base, width))
        out[pos - start:end - start] = block[pos - base:]
        pos = end
    return out


def sample_words(m: SymbolicMeasure, count: int, length: int, seed: int, stream: int = 0,
                 start: int = 0) -> np.ndarray:
    """Sampled words ``start .. start+count`` of one stream, as an int array."""
    if length < 1 or count < 0:
        raise DomainError("length must be >= 1 and count >= 0")
    u = uniforms(seed, stream, count, length, start)
    if isinstance(m, Bernoulli):
        cdf = np.cumsum([float(v) for v in m.p])
        return np.searchsorted(cdf[:-1], u, side="right").astype(np.int64)
    P = np.array([[float(v) for v in row] for row in m.P])
    cdfs = np.cumsum(P, axis=1)[:, :-1]
    pi_cdf = np.cumsum([float(v) for v in m.pi])[:-1]
    out = np.empty((count, length), dtype=np.int64)
    out[:, 0] = np.searchsorted(pi_cdf, u[:, 0], side="right")
    for k in range(1, length):
        out[:, k] = (u[:, k, None] >= cdfs[out[:, k - 1]]).sum(axis=1)
    return out


def sample_word(m: SymbolicMeasure, length: int, seed: int, stream: int = 0) -> tuple:
    return tuple(int(s) for s in sample_words(m, 1, length, seed, stream)[0])


def log2_cylinder_masses(m: SymbolicMeasure, words: np.ndarray) -> np.ndarray:
    """Vectorised ``log2 mu[w]`` for each row of ``words``."""
    words = np.asarray(words)
    with np.errstate(divide="ignore"):
        if isinstance(m, Bernoulli):
            lp = np.log2(np.array([float(v) for v in m.p]))
            return lp[words].sum(axis=1)
        lP = np.log2(np.array([[float(v) for v in row] for row in m.P]))
        lpi = np.log2(np.array([float(v) for v in m.pi]))
    return lpi[words[:, 0]] + lP[words[:, :-1], words[:, 1:]].sum(axis=1)
