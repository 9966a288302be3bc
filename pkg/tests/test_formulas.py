import math
from fractions import Fraction as F

import mpmath
import pytest

from fracdim.errors import DomainError
from fracdim.formulas import (
    convolution_dimension,
    lq_lower_bound,
    lyapunov_dimension_diagonal,
    multiplicative_dependence,
    orthogonal_projection_dimension,
    projection_dimension,
    similarity_dimension,
)
from fracdim.ifs import IFS1D, cantor_ifs

mpmath.mp.dps = 40
L2 = lambda x: mpmath.log(mpmath.mpf(x), 2)


def H(*p):
    """High-precision entropy oracle from decimal strings."""
    return -mpmath.fsum(mpmath.mpf(x) * L2(x) for x in p if mpmath.mpf(x) > 0)


def test_projection_dimension():
    assert projection_dimension(1, -1) == 1
    assert projection_dimension(0, -2) == 0
    oracle = H("0.7", "0.3") / L2(3)
    assert abs(projection_dimension(float(H("0.7", "0.3")), -math.log2(3)) - float(oracle)) < 1e-12
    assert abs(float(oracle) - 0.55603) < 1e-5
    with pytest.raises(DomainError):
        projection_dimension(1, 0.5)


def test_similarity_dimension():
    assert abs(similarity_dimension(cantor_ifs()) - math.log(2) / math.log(3)) < 1e-12
    assert similarity_dimension(IFS1D.from_pairs([(F(1, 2), 0), (F(1, 2), F(1, 2))])) == 1
    s = similarity_dimension(IFS1D.from_pairs([(F(1, 2), 0), (F(1, 3), 1)]))
    oracle = mpmath.findroot(lambda t: mpmath.mpf(2) ** -t + mpmath.mpf(3) ** -t - 1, 0.8)
    assert abs(s - float(oracle)) < 1e-12
    assert abs(s - 0.78788) < 1e-5


def test_convolution_dimension():
    rep = convolution_dimension(1.0, F(1, 3), 1.0, F(1, 4))
    assert rep.predicted == 1.0
    h1, h2 = H("0.9", "0.1"), H("0.8", "0.2")
    oracle = h1 / -L2(mpmath.mpf(1) / 3) + h2 / 2
    rep = convolution_dimension(float(h1), F(1, 3), float(h2), F(1, 4))
    assert abs(rep.predicted - float(oracle)) < 1e-12
    assert abs(rep.predicted - 0.65686) < 1e-5
    assert rep.hypothesis_flags["multiplicative_independence"] is True
    assert convolution_dimension(0, F(1, 3), 0, F(1, 4)).predicted == 0


def test_multiplicative_dependence():
    d = multiplicative_dependence(F(1, 4), F(1, 8))
    assert (d.independent, d.a, d.b) == (False, 3, 2)
    assert multiplicative_dependence(F(1, 3), F(1, 4)).independent is True
    d = multiplicative_dependence(F(1, 2), F(1, 2))
    assert (d.independent, d.a, d.b) == (False, 1, 1)
    assert multiplicative_dependence(0.3, 0.4).independent is None


def test_dependent_pair_warns():
    rep = convolution_dimension(0.5, F(1, 4), 0.5, F(1, 8))
    assert rep.hypothesis_flags["multiplicative_independence"] is False
    assert any("multiplicative_independence" in w for w in rep.warnings)


def test_orthogonal_projection_dimension():
    assert abs(orthogonal_projection_dimension(math.log2(3), F(1, 3)) - 1) < 1e-12
    h = H("0.7", "0.2", "0.1")
    got = orthogonal_projection_dimension(float(h), F(1, 3))
    assert abs(got - float(h / L2(3))) < 1e-12
    assert abs(got - 0.72984) < 1e-5
    assert orthogonal_projection_dimension(0, F(1, 3)) == 0


def test_lyapunov_dimension_diagonal():
    l3 = math.log2(3)
    assert lyapunov_dimension_diagonal(1, 1, l3).predicted == 1
    rep = lyapunov_dimension_diagonal(l3, 1, l3)
    oracle = 1 + (L2(3) - 1) / L2(3)
    assert abs(rep.predicted - float(oracle)) < 1e-12
    assert abs(rep.predicted - 1.36907) < 1e-5
    assert abs(rep.details["feng_hu"] - rep.predicted) < 1e-12
    assert lyapunov_dimension_diagonal(0, 1, 2).predicted == 0
    with pytest.raises(DomainError):
        lyapunov_dimension_diagonal(1, 2, 1)


def test_lq_lower_bound():
    s = similarity_dimension(cantor_ifs())
    rep = lq_lower_bound(1.0, -math.log2(3), s, s)
    assert abs(rep.predicted - s) < 1e-12
    rep = lq_lower_bound(float(H("0.7", "0.3")), -math.log2(3), s, s)
    assert abs(rep.predicted - 0.5560326498763891) < 1e-12
    assert lq_lower_bound(0.1, -1, 0.5, 0).predicted == 0
    assert rep.details["upper"] >= rep.predicted
