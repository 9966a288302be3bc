import itertools
import math
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from fracdim.ifs import IFS1D, AffineMap1D, cantor_ifs, word_map
from fracdim.separation import (
    FLOAT_MODE_WARNING,
    affine_distance,
    joint_separation_report,
    min_level_gap,
    separation_report,
)

OVERLAP_013 = IFS1D.homogeneous(F(1, 3), [0, 1, 3])
NEAR_OVERLAP = IFS1D.homogeneous(F(1, 3), [0, F(1, 5), 1])


def brute_force_gap(ifs, n):
    """All unordered pairs of distinct words, no sorting shortcuts."""
    words = list(itertools.product(range(len(ifs)), repeat=n))
    maps = {w: word_map(ifs, w) for w in words}
    best, pairs = math.inf, []
    for u, v in itertools.combinations(words, 2):
        d = affine_distance(maps[u], maps[v])
        if d < best:
            best, pairs = d, [(u, v)]
        elif d == best:
            pairs.append((u, v))
    return best, min(pairs) if best < math.inf else None


def test_affine_distance_examples():
    a, b = AffineMap1D(F(1, 3), 0), AffineMap1D(F(1, 3), F(2, 3))
    assert affine_distance(a, b) == F(2, 3)
    assert affine_distance(a, AffineMap1D(F(1, 2), 0)) == math.inf
    assert affine_distance(a, a) == 0


def test_cantor_level_two():
    gap, witness = min_level_gap(cantor_ifs(), 2)
    assert gap == F(2, 9)
    offs = {word_map(cantor_ifs(), w).offset for w in witness}
    assert offs in ({0, F(2, 9)}, {F(2, 3), F(8, 9)})


def test_cantor_gaps_match_closed_form_and_brute_force():
    for n in range(1, 5):
        gap, witness = min_level_gap(cantor_ifs(), n)
        assert gap == 2 * F(1, 3) ** n
        assert (gap, witness) == brute_force_gap(cantor_ifs(), n)
    rep = separation_report(cantor_ifs(), 6)
    assert [lv.min_gap for lv in rep.per_level] == [2 * F(1, 3) ** n for n in range(1, 7)]
    assert math.isclose(rep.c_estimate, min(float(2 * F(1, 3) ** n) ** (1 / n) for n in range(1, 7)))
    assert not rep.has_exact_overlap


def test_exact_overlap_013():
    gap, witness = min_level_gap(OVERLAP_013, 2)
    assert gap == 0
    assert set(witness) == {(0, 2), (1, 0)}
    assert word_map(OVERLAP_013, (0, 2)) == word_map(OVERLAP_013, (1, 0))
    rep = separation_report(OVERLAP_013, 4)
    assert rep.exact_overlap[0] == 2
    assert brute_force_gap(OVERLAP_013, 2)[0] == 0


def test_near_overlap_separated_to_level_8():
    rep = separation_report(NEAR_OVERLAP, 8)
    assert all(lv.min_gap > 0 for lv in rep.per_level)
    assert not rep.has_exact_overlap
    assert rep.c_estimate > 0


def test_heterogeneous_level_one_is_infinite():
    gap, witness = min_level_gap(IFS1D.from_pairs([(F(1, 2), 0), (F(1, 3), 1)]), 1)
    assert gap == math.inf and witness is None


def test_joint_report():
    c3, c4 = cantor_ifs(), cantor_ifs(F(1, 4))
    r1, r2, joint = joint_separation_report(c3, c4, 4)
    assert r1.c_estimate > 0 and r2.c_estimate > 0
    assert joint == min(r1.c_estimate, r2.c_estimate)
    r1, r2, _ = joint_separation_report(c3, OVERLAP_013, 3)
    assert r2.has_exact_overlap and not r1.has_exact_overlap
    a, b, _ = joint_separation_report(c3, c3, 4)
    assert a.per_level == b.per_level


def test_float_mode_warns():
    rep = separation_report(IFS1D.homogeneous(0.3, [0.0, 0.7]), 3)
    assert FLOAT_MODE_WARNING in rep.notes


small = st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=6), min_size=2, max_size=3)


@settings(max_examples=40, deadline=None)
@given(small, st.sampled_from([F(1, 2), F(1, 3), F(-1, 3)]), st.integers(1, 3))
def test_min_gap_matches_brute_force(offsets, r, n):
    ifs = IFS1D.homogeneous(r, offsets)
    assert min_level_gap(ifs, n) == brute_force_gap(ifs, n)
