import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capacitary.content import (ContentError, ContentParams, CoverWitness, InfeasibleSize, ball_content_estimate,
                                content_oracle, dyadic_content, minimal_cover, omega)
from capacitary.lattice import DyadicCube, LeafSet, build_root


def leafset(n, L, seed, p=0.4, side=1.0):
    r = build_root(n, L, side)
    return LeafSet(r, np.random.default_rng(seed).uniform(size=r.shape) < p)


def sets(n, L):
    return st.builds(lambda s, p: leafset(n, L, s, p), st.integers(0, 2**31), st.floats(0.05, 0.95))


def test_single_leaf_and_full_root():
    r = build_root(2, 3)
    E = LeafSet(r, np.zeros(r.shape, bool))
    assert dyadic_content(E, ContentParams(1.3)) == 0.0
    m = np.zeros(r.shape, bool)
    m[2, 5] = True
    assert dyadic_content(LeafSet(r, m), ContentParams(1.3)) == (1 / 8) ** 1.3
    assert dyadic_content(LeafSet.full(r), ContentParams(1.3)) == 1.0
    assert minimal_cover(LeafSet(r, m), ContentParams(1.3)).cubes == (DyadicCube(3, (2, 5)),)
    assert minimal_cover(LeafSet.full(r), ContentParams(1.3)).cubes == (DyadicCube(0, (0, 0)),)


def test_diagonal_quadrants():
    r = build_root(2, 1)
    E = LeafSet(r, [[1, 0], [0, 1]])
    assert dyadic_content(E, ContentParams(2.0)) == 0.5
    assert dyadic_content(E, ContentParams(1.0)) == 1.0
    # tie between the root and its two children goes to the root
    assert minimal_cover(E, ContentParams(1.0)).cubes == (DyadicCube(0, (0, 0)),)
    assert len(minimal_cover(E, ContentParams(2.0)).cubes) == 2


def test_frozen_small_value():
    # n=1, L=2, beta=0.5, E = leaves {0, 1, 3}: left half + leaf 3 costs 2^-0.5 + 1/2 > 1 = root
    r = build_root(1, 2)
    E = LeafSet(r, [1, 1, 0, 1])
    assert dyadic_content(E, ContentParams(0.5)) == 1.0
    # beta = 1 and the two right leaves missing: left half alone
    assert dyadic_content(LeafSet(r, [1, 1, 0, 0]), ContentParams(1.0)) == 0.5


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.3, 2.0])
def test_oracle_equivalence(beta):
    for seed in range(25):
        E = leafset(2, 3, seed, p=0.1 + 0.8 * (seed % 5) / 4)
        assert dyadic_content(E, ContentParams(beta)) == content_oracle(E, ContentParams(beta))


def test_oracle_small_cases():
    r = build_root(1, 2)
    one = LeafSet(r, [0, 0, 1, 0])
    assert content_oracle(one, ContentParams(0.7)) == 0.25**0.7
    assert content_oracle(LeafSet.empty(r), ContentParams(0.7)) == 0.0
    with pytest.raises(InfeasibleSize):
        content_oracle(LeafSet.full(build_root(2, 4)), ContentParams(1.0))


@given(sets(2, 3), st.sampled_from([0.4, 1.0, 1.5, 2.0]))
def test_witness_covers_and_matches(E, beta):
    params = ContentParams(beta)
    w = minimal_cover(E, params)
    cover = LeafSet.from_cubes(E.root, [c.box(E.root) for c in w.cubes])
    assert E <= cover
    assert w.weight == dyadic_content(E, params)
    assert math.isclose(math.fsum(c.side(E.root) ** beta for c in w.cubes), w.weight, rel_tol=1e-12)
    assert CoverWitness.from_json(w.to_json()) == w


@given(sets(2, 4), sets(2, 4), st.floats(0.3, 2.0))
def test_monotone_and_subadditive(E, F, beta):
    p = ContentParams(beta)
    H = lambda A: dyadic_content(A, p)
    assert H(E & F) <= H(E) <= H(E | F)
    assert H(E | F) <= H(E) + H(F) * (1 + 1e-14)
    assert H(E | F) + H(E & F) <= (H(E) + H(F)) * (1 + 1e-14)


@given(sets(1, 6), sets(2, 4))
def test_lebesgue_reduction(E1, E2):
    for E in (E1, E2):
        n = E.root.n
        assert dyadic_content(E, ContentParams(float(n))) == E.count() * E.root.h**n


@given(st.integers(0, 2**31), st.floats(0.3, 2.0))
def test_scaling_with_root_side(seed, beta):
    E1, E2 = leafset(2, 3, seed), leafset(2, 3, seed, side=2.0)
    assert dyadic_content(E2, ContentParams(beta)) == pytest.approx(2**beta * dyadic_content(E1, ContentParams(beta)),
                                                                    rel=1e-12)


def test_bounded_by_root():
    for seed in range(20):
        E = leafset(2, 4, seed)
        assert dyadic_content(E, ContentParams(1.2)) <= 1.0


def test_params_validation():
    with pytest.raises(ContentError):
        ContentParams(0.0)
    with pytest.raises(ContentError):
        ContentParams(1.0, "weird")
    with pytest.raises(ContentError):
        dyadic_content(LeafSet.full(build_root(1, 2)), ContentParams(1.5))


def test_ball_estimate():
    r = build_root(1, 3)
    p = ContentParams(1.0, "ball")
    assert ball_content_estimate(LeafSet.empty(r), p) == (0.0, 0.0)
    one = LeafSet(r, [0, 0, 1, 0, 0, 0, 0, 0])
    lo, hi = ball_content_estimate(one, p)
    # omega_1 = 2, one ball of radius h/2 covers the cell
    assert omega(1.0) == pytest.approx(2.0, rel=1e-15)
    assert hi == pytest.approx(1 / 8, rel=1e-12) and 0 < lo <= hi
    big = LeafSet(r, [0, 1, 1, 1, 0, 0, 0, 0])
    lo2, hi2 = ball_content_estimate(big, p)
    assert lo2 >= lo and lo2 <= hi2
    with pytest.raises(ContentError):
        ball_content_estimate(one, ContentParams(1.0))


def test_comparability_default():
    p = ContentParams(1.5)
    assert p.comparability(2) == pytest.approx(2**1.5 * 2**0.75 * max(1.0, 1 / omega(1.5)))
    assert ContentParams(1.5, cstar=3.0).comparability(2) == 3.0
