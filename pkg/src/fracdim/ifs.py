"""One-dimensional self-similar iterated function systems.

A map is ``x -> ratio * x + offset``. Words are plain tuples of symbol
indices; ``word_map`` composes left to right, so ``word_map(ifs, (i, j))``
is ``phi_i o phi_j``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import numbers as nb
from .errors import BudgetError, DomainError, InvalidWordError

Word = tuple  # tuple[int, ...]

#: Maximum number of words any single enumeration may produce.
WORD_BUDGET = 2_000_000


@dataclass(frozen=True)
class AffineMap1D:
    """Contracting similarity ``x -> ratio*x + offset`` of the line.

    The number mode is inferred: rationals (``int``, ``Fraction`` or
    ``"p/q"`` strings) give exact arithmetic, anything else gives
    96-bit floats. ``sentinel=True`` marks the identity produced by the
    empty word; it is the only map allowed to have ``|ratio| == 1``.
    """

    ratio: object
    offset: object = 0
    sentinel: bool = False
    mode: str = field(default="", compare=False)

    def __post_init__(self):
        mode = self.mode or nb.common_mode([self.ratio, self.offset])
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "ratio", nb.coerce(self.ratio, mode))
        object.__setattr__(self, "offset", nb.coerce(self.offset, mode))
        if self.sentinel:
            if self.ratio != 1 or self.offset != 0:
                raise DomainError("the identity sentinel must be (1, 0)")
        elif not 0 < abs(self.ratio) < 1:
            raise DomainError(f"contraction ratio must satisfy 0 < |r| < 1, got {self.ratio}")

    @classmethod
    def identity(cls, mode: str = nb.EXACT) -> "AffineMap1D":
        return cls(1, 0, sentinel=True, mode=mode)

    def __call__(self, x):
        return self.ratio * x + self.offset

    def require_contraction(self) -> "AffineMap1D":
        if self.sentinel:
            raise DomainError("the empty-word identity is not a contraction")
        return self


def compose(g1: AffineMap1D, g2: AffineMap1D) -> AffineMap1D:
    """Return ``g1 o g2``."""
    mode = nb.require_same_mode(g1.mode, g2.mode)
    if g1.sentinel:
        return g2
    if g2.sentinel:
        return g1
    return AffineMap1D(g1.ratio * g2.ratio, g1.ratio * g2.offset + g1.offset, mode=mode)


@dataclass(frozen=True)
class Interval:
    lo: object
    hi: object

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def diameter(self):
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class IFS1D:
    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise DomainError("an IFS needs at least one map")
        for g in maps:
            if not isinstance(g, AffineMap1D):
                raise TypeError(f"expected AffineMap1D, got {type(g).__name__}")
            g.require_contraction()
        nb.require_same_mode(*(g.mode for g in maps))
        object.__setattr__(self, "maps", maps)

    @classmethod
    def from_pairs(cls, pairs: Sequence) -> "IFS1D":
        """Build from ``(ratio, offset)`` pairs, choosing one mode for all."""
        pairs = [tuple(p) for p in pairs]
        mode = nb.common_mode([v for p in pairs for v in p])
        return cls(tuple(AffineMap1D(r, a, mode=mode) for r, a in pairs))

    @classmethod
    def homogeneous(cls, ratio, offsets: Sequence) -> "IFS1D":
        return cls.from_pairs([(ratio, a) for a in offsets])

    def __len__(self) -> int:
        return len(self.maps)

    @property
    def mode(self) -> str:
        return self.maps[0].mode

    @property
    def ratios(self) -> tuple:
        return tuple(g.ratio for g in self.maps)

    @property
    def offsets(self) -> tuple:
        return tuple(g.offset for g in self.maps)

    @property
    def max_abs_ratio(self):
        return max(abs(r) for r in self.ratios)

    @property
    def is_homogeneous(self) -> bool:
        r0 = self.maps[0].ratio
        return all(g.ratio == r0 for g in self.maps)


def cantor_ifs(ratio=Fraction(1, 3)) -> IFS1D:
    """``{r x, r x + 1 - r}``: the middle-interval Cantor system on [0, 1]."""
    return IFS1D.homogeneous(ratio, [0, 1 - ratio])


def check_word(ifs: IFS1D, w) -> Word:
    w = tuple(w)
    n = len(ifs)
    for i, s in enumerate(w):
        if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < n:
            raise InvalidWordError(f"symbol {s!r} at position {i} is not in 0..{n - 1}")
    return w


def word_map(ifs: IFS1D, w) -> AffineMap1D:
    w = check_word(ifs, w)
    acc = AffineMap1D.identity(ifs.mode)
    for s in w:
        acc = compose(acc, ifs.maps[s])
    return acc


def check_budget(n_symbols: int, length: int, budget: int | None = None) -> int:
    budget = WORD_BUDGET if budget is None else budget
    count = n_symbols ** length
    if count > budget:
        raise BudgetError(
            f"{n_symbols}^{length} = {count} words exceeds the enumeration budget {budget}"
        )
    return count


def iter_words(n_symbols: int, length: int) -> Iterator[Word]:
    return itertools.product(range(n_symbols), repeat=length)


def level_maps(ifs: IFS1D, length: int, budget: int | None = None) -> list[tuple[Word, AffineMap1D]]:
    """All ``(w, phi_w)`` with ``|w| == length`` in lexicographic order.

    Built by extending level ``k-1`` prefixes so each map costs one compose.
    """
    if length < 1:
        raise DomainError("level must be >= 1")
    check_budget(len(ifs), length, budget)
    level = [((s,), g) for s, g in enumerate(ifs.maps)]
    for _ in range(length - 1):
        level = [(w + (s,), compose(g, h)) for w, g in level for s, h in enumerate(ifs.maps)]
    return level


def attractor_bound(ifs: IFS1D) -> Interval:
    """``[-R, R]`` with ``R = max|a| / (1 - max|r|)``, forward invariant."""
    R = max(abs(a) for a in ifs.offsets) / (1 - ifs.max_abs_ratio)
    return Interval(-R, R)


def code_point(ifs: IFS1D, prefix) -> tuple:
    """Truncated coding map ``phi_prefix(0)`` and a bound on its error."""
    prefix = check_word(ifs, prefix)
    if not prefix:
        raise DomainError("code_point needs a nonempty prefix")
    g = word_map(ifs, prefix)
    box = attractor_bound(ifs)
    R = box.hi
    bound = ifs.max_abs_ratio ** len(prefix) * (R + box.diameter)
    return g.offset, bound


def block_ifs(ifs: IFS1D, m: int, budget: int | None = None) -> IFS1D:
    """The IFS of all length-``m`` compositions, symbols in lexicographic order."""
    if m < 1:
        raise DomainError("block length must be >= 1")
    if m == 1:
        return ifs
    return IFS1D(tuple(g for _, g in level_maps(ifs, m, budget)))
