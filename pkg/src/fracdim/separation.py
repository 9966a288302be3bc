"""Affine-map distance and level-wise separation scans.

Distances across different ratios are infinite, so level words are
bucketed by exact ratio and only offsets inside a bucket are compared.
Sorting a bucket reduces the minimum gap to adjacent differences, which
keeps level 8 of a three-map system (6561 words) cheap.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from . import numbers as nb
from .ifs import IFS1D, AffineMap1D, level_maps

INF = math.inf

FLOAT_MODE_WARNING = (
    "float mode compares ratios bit-for-bit; near-equal ratios may be "
    "classified as distinct"
)
EVIDENCE_NOTE = (
    "a positive c_estimate over finitely many levels is evidence of "
    "exponential separation, not a proof"
)


def affine_distance(g1: AffineMap1D, g2: AffineMap1D):
    """``|a1 - a2|`` when the ratios coincide exactly, otherwise ``inf``."""
    nb.require_same_mode(g1.mode, g2.mode)
    if g1.ratio != g2.ratio:
        return INF
    return abs(g1.offset - g2.offset)


@dataclass(frozen=True)
class LevelGap:
    n: int
    min_gap: object
    witness_pair: tuple | None


@dataclass
class SeparationReport:
    per_level: list[LevelGap]
    c_estimate: float | None
    exact_overlap: tuple | None = None
    mode: str = nb.EXACT
    notes: list[str] = field(default_factory=list)

    @property
    def has_exact_overlap(self) -> bool:
        return self.exact_overlap is not None


def _pair(u, v):
    return (u, v) if u <= v else (v, u)


def min_level_gap(ifs: IFS1D, n: int, budget: int | None = None):
    """Minimum affine distance over distinct pairs of length-``n`` words.

    Returns ``(min_gap, witness_pair)``; the witness is the
    lexicographically least pair attaining the minimum, or ``None`` when
    every pair has distinct ratios (``min_gap`` is then ``inf``).
    """
    buckets = defaultdict(list)
    for w, g in level_maps(ifs, n, budget):
        buckets[g.ratio].append((g.offset, w))

    best, witness = INF, None
    for entries in buckets.values():
        if len(entries) < 2:
            continue
        entries.sort()
        for (a1, w1), (a2, w2) in zip(entries, entries[1:]):
            gap = a2 - a1
            if gap > best:
                continue
            if gap == 0:
                # equal offsets: smallest two words sharing this offset
                group = sorted(w for a, w in entries if a == a1)
                cand = (group[0], group[1])
            else:
                cand = _pair(w1, w2)
            if gap < best or witness is None or cand < witness:
                best, witness = gap, cand
    return best, witness


def _c_estimate(levels: list[LevelGap]):
    vals = [float(lv.min_gap) ** (1.0 / lv.n) for lv in levels
            if lv.min_gap != INF and lv.min_gap > 0]
    return min(vals) if vals else None


def separation_report(ifs: IFS1D, max_level: int, budget: int | None = None) -> SeparationReport:
    levels = [LevelGap(n, *min_level_gap(ifs, n, budget)) for n in range(1, max_level + 1)]
    overlap = next(((lv.n, lv.witness_pair) for lv in levels if lv.min_gap == 0), None)
    notes = [EVIDENCE_NOTE]
    if ifs.mode == nb.FLOAT:
        notes.append(FLOAT_MODE_WARNING)
    if overlap is not None:
        notes.append(f"exact overlap at level {overlap[0]}: words {overlap[1][0]} and {overlap[1][1]}")
    return SeparationReport(levels, _c_estimate(levels), overlap, ifs.mode, notes)


def joint_separation_report(ifs1: IFS1D, ifs2: IFS1D, max_level: int, budget: int | None = None):
    """Reports for both systems over levels ``1..max_level`` and the joint estimate.

    The joint ``c`` is the smaller of the two estimates, or ``None`` when
    either system has no finite positive gap at any level.
    """
    r1 = separation_report(ifs1, max_level, budget)
    r2 = separation_report(ifs2, max_level, budget)
    if r1.c_estimate is None or r2.c_estimate is None:
        joint = None
    else:
        joint = min(r1.c_estimate, r2.c_estimate)
    return r1, r2, joint
