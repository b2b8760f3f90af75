import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.optimize import brentq

from capacitary.choquet import content_average
from capacitary.content import ContentParams, dyadic_content
from capacitary.lattice import GridFunction, LeafSet, build_root, enumerate_cubes
from capacitary.operators import (ExponentPair, MaximalError, RieszError, RieszParams, beta_riesz_potential,
                                  commutator, iterated_commutator, maximal_content, maximal_fractional,
                                  maximal_orlicz_fractional, maximal_sharp, riesz_potential, self_cell_constant)
from capacitary.operators.exponents import ExponentError
from capacitary.operators.riesz import _riesz_values
from capacitary.young import YoungSpec


def rand_f(n, L, seed, central=False, p=0.6):
    r = build_root(n, L)
    g = np.random.default_rng(seed)
    v = g.uniform(size=r.shape) * (g.uniform(size=r.shape) < p)
    if central:
        x = (np.arange(r.per_axis) + 0.5) / r.per_axis
        m = (x >= 0.25) & (x < 0.75)
        for ax in range(n):
            shape = [1] * n
            shape[ax] = -1
            v = v * m.reshape(shape)
    return GridFunction(r, v)


# --- maximal operators ------------------------------------------------------------------

def test_maximal_examples():
    r = build_root(1, 2)
    p = ContentParams(1.0)
    assert np.all(maximal_content(GridFunction(r, np.full(4, -2.0)), p).values == 2.0)
    chi = GridFunction(r, [1.0, 0.0, 0.0, 0.0])
    M = maximal_content(chi, p)
    assert M.values[0] == 1.0 and M.values[3] == 0.25
    chi2 = GridFunction(build_root(2, 3), (np.arange(64).reshape(8, 8) % 5 == 0).astype(float))
    M2 = maximal_content(chi2, ContentParams(1.2)).values
    assert np.all((M2 > 0) & (M2 <= 1.0 + 1e-15)) and np.all(M2[chi2.values > 0] == 1.0)


def test_sharp_examples():
    r = build_root(1, 1)
    p = ContentParams(1.0)
    assert np.array_equal(maximal_sharp(GridFunction(r, [0.0, 1.0]), p).values, [0.5, 0.5])
    assert not maximal_sharp(GridFunction(build_root(1, 3), np.full(8, 3.3)), p).values.any()


@given(st.integers(0, 2**31), st.floats(-5, 5), st.integers(-4, 4))
def test_sharp_translation_and_scaling(seed, c1, k):
    f = rand_f(1, 4, seed)
    p = ContentParams(0.7)
    c2 = -(2.0**k)
    g = GridFunction(f.root, c1 + c2 * f.values)
    assert maximal_sharp(g, p).values == pytest.approx(abs(c2) * maximal_sharp(f, p).values, rel=1e-9, abs=1e-12)


def test_fractional_examples():
    r = build_root(1, 2)
    p = ContentParams(1.0)
    f = rand_f(1, 5, 3)
    assert np.array_equal(maximal_fractional(f, 0.0, ContentParams(0.8)).values,
                          maximal_content(f, ContentParams(0.8)).values)
    r2 = build_root(1, 3, side=2.0)
    one = maximal_fractional(GridFunction(r2, np.ones(8)), 0.5, p).values
    assert one == pytest.approx(np.full(8, 2.0**0.5), rel=1e-15)
    chi = GridFunction(r, [1.0, 0.0, 0.0, 0.0])
    # ancestors of leaf 0: side^(1/2) times the content average
    want = max(0.25**0.5 * 1.0, 0.5**0.5 * 0.5, 1.0 * 0.25)
    assert maximal_fractional(chi, 0.5, p).values[0] == pytest.approx(want, rel=1e-15)
    with pytest.raises(MaximalError):
        maximal_fractional(chi, 1.0, p)


def test_orlicz_fractional_examples():
    f = rand_f(1, 4, 9)
    p = ContentParams(0.8)
    a = maximal_orlicz_fractional(f, 0.3, YoungSpec.power(1.0), p).values
    b = maximal_fractional(f, 0.3, p, denominator="power").values
    assert a == pytest.approx(b, rel=1e-13)
    t1 = brentq(lambda t: t * math.log(math.e + t) - 1.0, 1e-6, 1.0, xtol=1e-15)
    r = build_root(1, 4)
    c = maximal_orlicz_fractional(GridFunction(r, np.full(16, 2.0)), 0.3, YoungSpec.tlog(), p).values
    assert c == pytest.approx(np.full(16, 2.0 / t1), rel=1e-10)
    assert not maximal_orlicz_fractional(GridFunction(r, np.zeros(16)), 0.3, YoungSpec.tlog(), p).values.any()


@given(st.integers(0, 2**31), st.sampled_from(["dyadic", "shifted-dyadic"]))
def test_maximal_pointwise_facts(seed, family):
    f = rand_f(1, 5, seed)
    p = ContentParams(0.6)
    M = maximal_content(f, p, family).values
    assert np.all(M >= np.abs(f.values) * (1 - 1e-15))
    bigger = GridFunction(f.root, f.values + 0.1)
    assert np.all(maximal_content(bigger, p, family).values >= M)
    assert maximal_content(GridFunction(f.root, 4 * f.values), p, family).values == pytest.approx(4 * M, rel=1e-14)
    Mf = maximal_fractional(f, 0.2, p, family).values
    Mo = maximal_orlicz_fractional(f, 0.2, YoungSpec.tlog(), p, family).values
    assert np.all(Mf <= 4 * Mo * (1 + 1e-9))


def test_maximal_matches_enumeration():
    f = rand_f(2, 3, 5)
    p = ContentParams(1.3)
    M = maximal_content(f, p, "grid-aligned-all").values
    want = np.zeros(f.root.shape)
    for Q in enumerate_cubes(f.root, "grid-aligned-all"):
        sl = Q.slices()
        want[sl] = np.maximum(want[sl], content_average(f, Q, p))
    assert M == pytest.approx(want, rel=1e-12)


# --- Riesz potentials ------------------------------------------------------------------

def cell_mean_oracle(n, alpha):
    if n == 1:
        return integrate.quad(lambda z: abs(z) ** (alpha - 1), -0.5, 0.5, points=[0.0])[0]
    # polar coordinates over the eighth of the square below the diagonal
    inner = lambda th: (0.5 / math.cos(th)) ** alpha / alpha
    return 8 * integrate.quad(inner, 0.0, math.pi / 4, epsabs=1e-13, epsrel=1e-12)[0]


@pytest.mark.parametrize("n,alpha", [(1, 0.25), (1, 0.5), (2, 0.5), (2, 1.3)])
def test_self_cell_constant(n, alpha):
    assert self_cell_constant(n, alpha) == pytest.approx(cell_mean_oracle(n, alpha), rel=1e-10)


def test_riesz_zero_and_errors():
    r = build_root(2, 3)
    assert not riesz_potential(GridFunction(r, np.zeros(r.shape)), RieszParams(0.5)).values.any()
    with pytest.raises(RieszError):
        riesz_potential(GridFunction(build_root(1, 3), np.ones(8)), RieszParams(1.0))
    with pytest.raises(RieszError):
        RieszParams(0.5, "magic")


def test_riesz_symmetry():
    r = build_root(2, 5)
    x = (np.arange(32) + 0.5) / 32 - 0.5
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = GridFunction(r, np.exp(-(X**2 + Y**2) * 40) * (X**2 + Y**2 < 0.06))
    v = riesz_potential(f, RieszParams(0.7)).values
    for g in (v.T, v[::-1, :], v[:, ::-1], v[::-1, ::-1].T):
        assert np.max(np.abs(g - v)) <= 1e-12 * np.max(v)


@pytest.mark.parametrize("n,L,alpha", [(1, 7, 0.25), (2, 5, 0.6)])
def test_riesz_far_field(n, L, alpha):
    r = build_root(n, L)
    v = np.zeros(r.shape)
    src = (r.per_axis // 4,) * n
    v[src] = 1.0
    out = riesz_potential(GridFunction(r, v), RieszParams(alpha)).values
    for d in (8, 12, 20):
        tgt = (src[0] + d,) + src[1:]
        exact = r.h**n * (d * r.h) ** (alpha - n)
        assert abs(out[tgt] / exact - 1) < 0.01


@given(st.integers(0, 2**31), st.sampled_from([(1, 6, 0.3), (2, 4, 0.8), (2, 4, 1.5)]))
def test_riesz_methods_agree(seed, case):
    n, L, alpha = case
    f = rand_f(n, L, seed, central=True)
    rp = RieszParams(alpha)
    a = _riesz_values(f.root, f.values, rp, "fft")
    b = _riesz_values(f.root, f.values, rp, "direct")
    assert np.max(np.abs(a - b)) <= 1e-10 * max(np.max(np.abs(b)), 1e-300)


@given(st.integers(0, 2**31), st.floats(-3, 3))
def test_riesz_positive_and_linear(seed, c):
    f, g = rand_f(1, 6, seed, True), rand_f(1, 6, seed + 1, True)
    rp = RieszParams(0.4)
    If, Ig = riesz_potential(f, rp).values, riesz_potential(g, rp).values
    assert np.all(If >= 0)
    combo = riesz_potential(GridFunction(f.root, f.values + c * g.values), rp).values
    assert combo == pytest.approx(If + c * Ig, rel=1e-10, abs=1e-12 * np.max(If + abs(c) * Ig))


def beta_riesz_oracle(f, alpha, params):
    """Brute force: one dyadic_content per distinct value of y -> f(y) K(x - y)."""
    r = f.root
    n = r.n
    out = np.zeros(r.shape)
    c = self_cell_constant(n, alpha) * r.h ** (alpha - n)
    for i in np.ndindex(*r.shape):
        d2 = sum((np.indices(r.shape)[k] - i[k]) ** 2 for k in range(n)) * r.h**2
        with np.errstate(divide="ignore"):
            K = np.where(d2 > 0, d2 ** ((alpha - n) / 2), c)
        g = f.values * K
        levels = np.unique(g[g > 0])
        acc, prev = [], 0.0
        for t in levels:
            acc.append((t - prev) * dyadic_content(LeafSet(r, g >= t), params))
            prev = t
        out[i] = math.fsum(acc)
    return out


def test_beta_riesz_against_oracle():
    r = build_root(2, 2)
    p = ContentParams(1.2)
    chi = GridFunction(r, [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 0, 0], [1, 1, 0, 0]])
    assert beta_riesz_potential(chi, 0.5, p).values == pytest.approx(beta_riesz_oracle(chi, 0.5, p), rel=1e-12)
    f = rand_f(1, 4, 2)
    p1 = ContentParams(0.7)
    R = beta_riesz_potential(f, 0.3, p1).values
    assert R == pytest.approx(beta_riesz_oracle(f, 0.3, p1), rel=1e-12)
    assert np.all(beta_riesz_potential(GridFunction(f.root, f.values + 0.2), 0.3, p1).values >= R)
    assert not beta_riesz_potential(GridFunction(r, np.zeros((4, 4))), 0.5, p).values.any()


# --- commutators -------------------------------------------------------------------------

def test_commutator_vanishes_on_constants():
    f = rand_f(2, 4, 1, True)
    rp = RieszParams(0.7)
    C = commutator(GridFunction(f.root, np.full(f.root.shape, 7.0)), f, rp).values
    assert np.max(np.abs(C)) <= 1e-10 * np.max(riesz_potential(f, rp).values)
    C2 = iterated_commutator(GridFunction(f.root, np.full(f.root.shape, -2.0)), f, 2, rp).values
    assert np.max(np.abs(C2)) <= 1e-10 * np.max(riesz_potential(f, rp).values)


@given(st.integers(0, 2**31))
def test_commutator_linear_in_f(seed):
    g = np.random.default_rng(seed)
    r = build_root(1, 6)
    b = GridFunction(r, g.standard_normal(64))
    f1, f2 = rand_f(1, 6, seed, True), rand_f(1, 6, seed + 7, True)
    rp = RieszParams(0.25)
    lhs = commutator(b, f1 + f2, rp).values
    rhs = commutator(b, f1, rp).values + commutator(b, f2, rp).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_commutator_left_half_example():
    r = build_root(1, 5)
    b = GridFunction(r, (np.arange(32) < 16).astype(float))
    f = np.zeros(32)
    f[20] = 1.0
    f = GridFunction(r, f)
    rp = RieszParams(0.25)
    C = commutator(b, f, rp).values
    I = riesz_potential(f, rp).values
    assert C[:16] == pytest.approx(I[:16], rel=1e-12)
    # direct kernel value at a left cell
    assert C[3] == pytest.approx(r.h * ((20 - 3) * r.h) ** (0.25 - 1), rel=1e-10)


def test_iterated_commutator():
    r = build_root(1, 4)
    g = np.random.default_rng(8)
    b = GridFunction(r, g.standard_normal(16))
    f = GridFunction(r, g.uniform(size=16))
    rp = RieszParams(0.25, "direct")
    assert np.array_equal(iterated_commutator(b, f, 1, rp).values, commutator(b, f, rp).values)
    # m = 2 against the direct double sum
    alpha, h = 0.25, r.h
    c = self_cell_constant(1, alpha) * h ** (alpha - 1)
    want = np.zeros(16)
    for i in range(16):
        for j in range(16):
            K = c if i == j else (abs(i - j) * h) ** (alpha - 1)
            want[i] += (b.values[i] - b.values[j]) ** 2 * K * f.values[j] * h
    got = iterated_commutator(b, f, 2, RieszParams(alpha)).values
    assert np.max(np.abs(got - want)) <= 1e-10 * np.max(np.abs(want))
    shifted = iterated_commutator(GridFunction(r, b.values + 3.0), f, 2, RieszParams(alpha)).values
    assert np.max(np.abs(shifted - got)) <= 1e-10 * np.max(np.abs(want))
    with pytest.raises(ValueError):
        iterated_commutator(b, f, 0, rp)


def test_exponent_pair():
    pair = ExponentPair(2.0, 0.25, 1.0)
    assert 1 / pair.p - 1 / pair.q == pytest.approx(0.25, rel=1e-15)
    assert pair.q > pair.p
    for bad in [(1.0, 0.25, 1.0), (4.0, 0.25, 1.0), (2.0, 1.0, 1.0)]:
        with pytest.raises(ExponentError):
            ExponentPair(*bad)
