import itertools
import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracdim.errors import DomainError
from fracdim.ifs import IFS1D, cantor_ifs
from fracdim.measures import (
    Bernoulli,
    Markov,
    cylinder_mass,
    entropy,
    is_irreducible,
    log2_cylinder_masses,
    lyapunov,
    sample_word,
    sample_words,
    stationary_distribution,
    uniforms,
)

EX_P = ((F(1, 2), F(1, 2)), (F(1), F(0)))


def test_cylinder_mass_examples():
    assert math.isclose(cylinder_mass(Bernoulli((0.7, 0.3)), (0, 1)), 0.21)
    assert cylinder_mass(Bernoulli(("7/10", "3/10")), (0, 1)) == F(21, 100)
    mk = Markov(EX_P)
    assert mk.pi == (F(2, 3), F(1, 3))
    assert cylinder_mass(mk, (1, 0)) == F(1, 3)
    assert cylinder_mass(mk, ()) == 1
    assert cylinder_mass(Bernoulli((0.7, 0.3)), ()) == 1


def test_entropy_examples():
    assert entropy(Bernoulli((F(1, 2), F(1, 2)))) == 1.0
    mpmath.mp.dps = 30
    oracle = -(mpmath.mpf("0.7") * mpmath.log(mpmath.mpf("0.7"), 2)
               + mpmath.mpf("0.3") * mpmath.log(mpmath.mpf("0.3"), 2))
    assert abs(entropy(Bernoulli((0.7, 0.3))) - float(oracle)) < 1e-14
    assert abs(entropy(Bernoulli((0.7, 0.3))) - 0.88129) < 5e-6
    assert math.isclose(entropy(Markov(((0.5, 0.5), (0.5, 0.5)))), 1.0)
    # entropy rate of the 2x2 example: pi_0 * H(1/2,1/2) + pi_1 * 0
    assert math.isclose(entropy(Markov(EX_P)), 2 / 3)


def test_lyapunov_examples():
    assert math.isclose(lyapunov(Bernoulli((0.5, 0.5)), cantor_ifs()), -math.log2(3))
    two = IFS1D.from_pairs([(F(1, 2), 0), (F(1, 4), 1)])
    assert math.isclose(lyapunov(Bernoulli((0.7, 0.3)), two), -1.3)
    assert math.isclose(lyapunov(Markov(EX_P), cantor_ifs()), -math.log2(3))


def test_stationary_distribution_examples():
    assert stationary_distribution(EX_P) == (F(2, 3), F(1, 3))
    ds = ((F(1, 4), F(3, 4), 0), (F(3, 4), 0, F(1, 4)), (0, F(1, 4), F(3, 4)))
    assert stationary_distribution(ds) == (F(1, 3),) * 3
    assert not is_irreducible(((1, 0), (0, 1)))
    with pytest.raises(DomainError):
        stationary_distribution(((1, 0), (0, 1)))


def test_invalid_measures():
    with pytest.raises(DomainError):
        Bernoulli((0.5, 0.4))
    with pytest.raises(DomainError):
        Bernoulli((1.2, -0.2))
    with pytest.raises(DomainError):
        Markov(((0.5, 0.5), (1.0, 0.0)), pi=(0.5, 0.5))


def test_sampling_examples():
    assert sample_word(Bernoulli((1, 0)), 50, seed=3) == (0,) * 50
    mu = Bernoulli((0.7, 0.3))
    assert sample_word(mu, 100, seed=11) == sample_word(mu, 100, seed=11)
    assert sample_word(mu, 100, seed=11) != sample_word(mu, 100, seed=12)
    w = sample_words(mu, 1, 100_000, seed=5)[0]
    assert abs((w == 0).mean() - 0.7) < 0.01


def test_markov_sampling_respects_transitions():
    w = sample_words(Markov(EX_P), 200, 50, seed=9)
    # symbol 1 is always followed by 0
    follows = w[:, 1:][w[:, :-1] == 1]
    assert (follows == 0).all()
    assert abs((w == 1).mean() - 1 / 3) < 0.02


def test_prefix_consistency():
    full = uniforms(7, 0, 40_000, 3)
    part = uniforms(7, 0, 1000, 3, start=20_000)
    assert np.array_equal(full[20_000:21_000], part)
    assert np.array_equal(uniforms(7, 0, 10, 3), full[:10])
    assert not np.array_equal(uniforms(7, 1, 10, 3), full[:10])


def test_vectorised_log_masses():
    mk = Markov(((0.2, 0.8, 0.0), (0.5, 0.25, 0.25), (0.3, 0.3, 0.4)))
    words = sample_words(mk, 50, 6, seed=1)
    got = log2_cylinder_masses(mk, words)
    want = [math.log2(cylinder_mass(mk, tuple(w))) for w in words]
    assert np.allclose(got, want)


probs = st.lists(st.integers(0, 20), min_size=1, max_size=4).filter(sum).map(
    lambda xs: tuple(F(x, sum(xs)) for x in xs))


@settings(max_examples=80, deadline=None)
@given(probs, st.data())
def test_bernoulli_cylinder_additivity(p, data):
    mu = Bernoulli(p)
    w = tuple(data.draw(st.lists(st.integers(0, len(p) - 1), max_size=4)))
    assert sum(cylinder_mass(mu, w + (s,)) for s in range(len(p))) == cylinder_mass(mu, w)


@st.composite
def markov_chains(draw):
    n = draw(st.integers(1, 3))
    rows = [draw(st.lists(st.integers(1, 9), min_size=n, max_size=n)) for _ in range(n)]
    return tuple(tuple(F(x, sum(r)) for x in r) for r in rows)


@settings(max_examples=60, deadline=None)
@given(markov_chains(), st.data())
def test_markov_cylinder_additivity_and_stationarity(P, data):
    mk = Markov(P)
    n = len(P)
    w = tuple(data.draw(st.lists(st.integers(0, n - 1), max_size=4)))
    assert sum(cylinder_mass(mk, w + (s,)) for s in range(n)) == cylinder_mass(mk, w)
    assert sum(cylinder_mass(mk, (s,) + w) for s in range(n)) == cylinder_mass(mk, w)
    assert sum(cylinder_mass(mk, u) for u in itertools.product(range(n), repeat=3)) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 3))
def test_sampling_deterministic(seed, stream):
    mu = Bernoulli((0.5, 0.25, 0.25))
    a = sample_words(mu, 5, 7, seed, stream)
    b = sample_words(mu, 5, 7, seed, stream)
    assert np.array_equal(a, b)
