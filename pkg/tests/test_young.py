import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from capacitary.content import ContentParams, dyadic_content
from capacitary.lattice import DyadicCube, GridFunction, LeafSet, build_root
from capacitary.choquet import content_average
from capacitary.young import (EndpointFns, YoungError, YoungSpec, complementary_eval, endpoint_eval, h_B,
                              luxemburg_global, luxemburg_mean, parse_endpoint, parse_young)

TLOG = YoungSpec.tlog(1, 1)
SPECS = [YoungSpec.power(1.0), YoungSpec.power(2.0), TLOG, YoungSpec.tlog(1, 2), YoungSpec.expm1(),
         YoungSpec.table([1.0, 2.0, 4.0], [1.0, 3.0, 9.0])]


def test_parse():
    assert parse_young("B=t*log(e+t)") == TLOG
    assert parse_young("B=pow:2") == YoungSpec.power(2.0)
    assert parse_young("exp-1") == YoungSpec.expm1()
    E = parse_endpoint("Psi:alpha=0.25,beta=1")
    assert (E.alpha, E.beta) == (0.25, 1.0)
    with pytest.raises(YoungError):
        parse_young("sin(t)")


def test_validation():
    with pytest.raises(YoungError):
        YoungSpec.power(0.5)
    with pytest.raises(YoungError):
        YoungSpec.table([1.0, 2.0], [1.0, 1.5])  # concave
    with pytest.raises(YoungError):
        TLOG(np.array([-1.0]))
    with pytest.raises(YoungError):
        EndpointFns(1.0, 1.0)


def test_values_at_zero():
    for B in SPECS:
        assert B(np.zeros(1))[0] == 0.0
    assert complementary_eval(TLOG, 0.0)[0] == 0.0


def test_complementary_of_square():
    t = np.linspace(0.0, 20.0, 41)
    assert complementary_eval(YoungSpec.power(2.0), t) == pytest.approx(t**2 / 4, rel=1e-9, abs=1e-12)


def test_complementary_of_power_r():
    # conjugate of t^r is (r-1) r^(-r') t^r' with r' = r/(r-1)
    r = 3.0
    rp = r / (r - 1)
    t = np.logspace(-2, 2, 17)
    want = (r - 1) * r ** (-rp) * t**rp
    assert complementary_eval(YoungSpec.power(r), t) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("B", SPECS[1:5], ids=lambda B: B.describe())
def test_young_inequality(B):
    s = np.logspace(-3, 1.3, 40)
    t = np.logspace(-3, 1.3, 40)
    Bbar = B.complementary()
    S, T = np.meshgrid(s, t)
    assert np.all(S * T <= (B(S) + Bbar(T)) * (1 + 1e-12))
    assert 1.0 <= B(np.ones(1))[0] + Bbar(np.ones(1))[0]


def test_complementary_is_convex_and_below_exp_for_tlog():
    t = np.linspace(0.0, 8.0, 161)
    v = complementary_eval(TLOG, t)
    assert np.all(np.diff(v, 2) >= -1e-9)
    # the conjugate of t log(e+t) grows like an exponential
    assert np.all(v <= np.expm1(t) + 1e-12)


def test_h_B_examples():
    for B in SPECS:
        assert h_B(B, 1.0)[0] == pytest.approx(1.0, abs=1e-12)
        assert h_B(B, 0.0)[0] == 0.0
    s = np.array([0.25, 0.5, 2.0, 7.0])
    for r in (1.0, 1.5, 3.0):
        assert h_B(YoungSpec.power(r), s) == pytest.approx(s**r, rel=1e-12)


def test_h_B_monotone_and_submultiplicative():
    s = np.logspace(-3, 3, 25)
    h = h_B(TLOG, s)
    assert np.all(np.diff(h) > 0)
    S, T = np.meshgrid(s[::3], s[::3])
    lhs = h_B(TLOG, (S * T).ravel())
    rhs = (h_B(TLOG, S.ravel()) * h_B(TLOG, T.ravel()))
    assert np.all(lhs <= rhs * (1 + 1e-9))


def t1_tlog():
    return brentq(lambda t: t * math.log(math.e + t) - 1.0, 1e-6, 1.0, xtol=1e-15)


def test_luxemburg_mean_constants():
    r = build_root(1, 4)
    p = ContentParams(0.7)
    Q = DyadicCube(2, (1,))
    a = 3.0
    f = GridFunction(r, np.full(16, a))
    assert luxemburg_mean(f, Q, YoungSpec.power(1.0), p) == pytest.approx(a, rel=1e-14)
    assert luxemburg_mean(f, Q, TLOG, p) == pytest.approx(a / t1_tlog(), rel=1e-11)
    assert luxemburg_mean(GridFunction(r, np.zeros(16)), Q, TLOG, p) == 0.0
    # B(t) = t gives the content average
    g = GridFunction(r, np.random.default_rng(1).uniform(size=16))
    assert luxemburg_mean(g, Q, YoungSpec.power(1.0), p) == pytest.approx(content_average(g, Q, p), rel=1e-13)


def test_luxemburg_global():
    r = build_root(2, 3)
    m = np.zeros(r.shape, bool)
    m[2:5, 1:7] = True
    p = ContentParams(1.3)
    w = dyadic_content(LeafSet(r, m), p)
    f = GridFunction(r, 2.5 * m)
    assert luxemburg_global(f, None, YoungSpec.power(1.0), p) == pytest.approx(2.5 * w, rel=1e-13)


@given(st.integers(0, 2**31), st.floats(0.1, 10.0))
def test_luxemburg_monotone_and_homogeneous(seed, c):
    r = build_root(1, 5)
    g = np.random.default_rng(seed)
    f = GridFunction(r, g.uniform(size=32))
    bigger = GridFunction(r, f.values + g.uniform(size=32))
    p = ContentParams(0.8)
    a = luxemburg_global(f, None, TLOG, p)
    assert a <= luxemburg_global(bigger, None, TLOG, p) * (1 + 1e-11)
    assert luxemburg_global(GridFunction(r, -c * f.values), None, TLOG, p) == pytest.approx(c * a, rel=1e-10)


def test_endpoint_functions():
    E = EndpointFns(0.25, 1.0)
    assert endpoint_eval(E, "Psi", 0.0) == 0.0
    assert endpoint_eval(E, "Psi", 1.0) == pytest.approx(math.log(math.e + 1) ** (1 / 0.75), rel=1e-14)
    assert endpoint_eval(E, "Phi1", 1.0)[0] == pytest.approx(1.0, abs=1e-12)
    assert endpoint_eval(E, "Phi1", 0.0)[0] == 0.0
    t = np.logspace(-4, 4, 60)
    assert np.all(np.diff(E.psi(t)) > 0)
    phi = E.phi1(t)
    assert np.all(np.diff(phi) > 0)
    assert np.all(np.diff(phi / t) <= 1e-12 * (phi / t)[1:])


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=8))
def test_phi1_subadditive(xs):
    E = EndpointFns(0.5, 0.75)
    assert E.phi1(sum(xs))[0] <= np.sum(E.phi1(np.array(xs))) * (1 + 1e-9)


def test_orlicz_holder_random_pairs():
    r = build_root(1, 5)
    p = ContentParams(0.8)
    Bbar = TLOG.complementary()
    g = np.random.default_rng(4)
    for _ in range(10):
        f = GridFunction(r, g.uniform(size=32) * (g.uniform(size=32) < 0.5))
        h = GridFunction(r, g.uniform(size=32))
        Q = DyadicCube(int(g.integers(0, 3)), (0,))
        lhs = content_average(f * h, Q, p, "power")
        assert lhs <= 4 * luxemburg_mean(f, Q, TLOG, p) * luxemburg_mean(h, Q, Bbar, p) * (1 + 1e-9)
