import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capacitary.lattice import (BudgetExceeded, DyadicCube, GridFunction, LatticeError, LeafSet,
                                build_root, centered_dilation, dilate, enumerate_cubes, from_morton,
                                read_grid, restrict, to_morton, write_grid)


def test_build_root_counts():
    r = build_root(1, 3, 1.0, 0.0)
    assert r.num_leaves == 8 and r.h == 1 / 8
    r = build_root(2, 2, 2.0, (0.0, 0.0))
    assert r.num_leaves == 16 and r.h == 0.5


def test_build_root_errors():
    with pytest.raises(BudgetExceeded):
        build_root(2, 11)
    with pytest.raises(LatticeError):
        build_root(4, 2)
    with pytest.raises(LatticeError):
        build_root(1, 0)
    with pytest.raises(LatticeError):
        build_root(1, 2, side=-1.0)


def test_enumerate_dyadic_containing_leaf():
    r = build_root(1, 3)
    cubes = enumerate_cubes(r, "dyadic", containing=5)
    assert [c.level for c in cubes] == [0, 1, 2, 3]
    assert all(c.box(r).contains_leaf((5,)) for c in cubes)


def test_enumerate_dyadic_count():
    assert len(enumerate_cubes(build_root(2, 2), "dyadic")) == 21


def test_enumerate_grid_aligned_all_exhaustive():
    r = build_root(1, 2)
    got = {(c.lo[0], c.lo[0] + c.size) for c in enumerate_cubes(r, "grid-aligned-all")}
    assert got == {(i, j) for i in range(4) for j in range(i + 1, 5)}
    assert len(got) == 10


def test_family_inclusions():
    r = build_root(2, 3)
    dy = {c.box(r) for c in enumerate_cubes(r, "dyadic")}
    sh = set(enumerate_cubes(r, "shifted-dyadic"))
    al = set(enumerate_cubes(r, "grid-aligned-all"))
    assert dy <= sh <= al


def test_grid_aligned_budget():
    r = build_root(2, 5)
    with pytest.raises(BudgetExceeded):
        enumerate_cubes(r, "grid-aligned-all", budget=100)
    sub = enumerate_cubes(r, "grid-aligned-all", budget=100, on_budget="subsample", seed=3)
    assert len(sub) == 100 and sub == enumerate_cubes(r, "grid-aligned-all", budget=100, on_budget="subsample",
                                                      seed=3)


def test_restrict_examples():
    r = build_root(1, 2)
    f = GridFunction(r, [1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(restrict(f, DyadicCube(1, (1,))), [3.0, 4.0])
    assert np.array_equal(restrict(f, DyadicCube(0, (0,))), f.values)
    left = GridFunction(r, [1.0, 1.0, 0.0, 0.0])
    assert not restrict(left, DyadicCube(1, (1,))).any()
    with pytest.raises(ValueError):
        restrict(f, DyadicCube(1, (1,)))[0] = 7.0


def test_grid_function_rejects_nonfinite():
    with pytest.raises(LatticeError):
        GridFunction(build_root(1, 1), [1.0, np.inf])


@given(st.integers(1, 3), st.integers(1, 4))
def test_children_tile_parent(n, L):
    r = build_root(n, L, budget=2**12)
    for k in range(L):
        for c in itertools.product(range(1 << k), repeat=n):
            Q = DyadicCube(k, c)
            kids = Q.children()
            assert len(kids) == 2**n
            assert sum(ch.side(r) ** n for ch in kids) == pytest.approx(Q.side(r) ** n, rel=1e-15)
            m = LeafSet.from_cubes(r, [ch.box(r) for ch in kids]).mask
            assert np.array_equal(m, LeafSet.from_cubes(r, [Q.box(r)]).mask)
            assert all(ch.parent() == Q for ch in kids)


@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_ancestor_chain(n, L, data):
    r = build_root(n, L, budget=2**12)
    leaf = tuple(data.draw(st.integers(0, 2**L - 1)) for _ in range(n))
    chain = enumerate_cubes(r, "dyadic", containing=leaf)
    assert len(chain) == L + 1
    for a, b in zip(chain, chain[1:]):
        assert a.box(r).contains(b.box(r))


@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_morton_roundtrip(n, L, seed):
    v = np.random.default_rng(seed).standard_normal((2**L,) * n)
    m = to_morton(v, n, L)
    assert np.array_equal(from_morton(m, n, L).reshape(v.shape), v)
    # dyadic cubes are contiguous Morton blocks
    k = L - 1
    size = 2 ** (n * (L - k))
    Q = DyadicCube(k, ((1 << k) - 1,) * n)
    blk = np.sort(m[_morton_index(Q, n) * size:(_morton_index(Q, n) + 1) * size])
    assert np.array_equal(blk, np.sort(v[Q.box(build_root(n, L, budget=2**12)).slices()].ravel()))


def _morton_index(Q, n):
    p = 0
    for b in range(Q.level - 1, -1, -1):
        digit = 0
        for d in range(n):
            digit = (digit << 1) | ((Q.coords[d] >> b) & 1)
        p = (p << n) | digit
    return p


def test_enumeration_deterministic():
    r = build_root(2, 3)
    assert enumerate_cubes(r, "shifted-dyadic") == enumerate_cubes(r, "shifted-dyadic")


def test_dilation_contains_cube_and_stays_inside():
    r = build_root(1, 4)
    for c in range(16):
        Q = DyadicCube(4, (c,))
        for k in range(5):
            D = dilate(Q, k, r)
            assert D.inside(r) and D.contains(Q.box(r)) and D.size == min(1 << k, 16)
    D = centered_dilation(DyadicCube(2, (1,)), 1, r)
    assert np.flatnonzero(D.mask).tolist() == list(range(2, 10))


@pytest.mark.parametrize("suffix", [".txt", ".bin"])
def test_grid_io_roundtrip(tmp_path, suffix):
    r = build_root(2, 3, 2.0, (1.0, -1.0))
    f = GridFunction(r, np.random.default_rng(0).standard_normal(r.shape))
    write_grid(f, tmp_path / f"f{suffix}")
    g = read_grid(tmp_path / f"f{suffix}")
    assert g.root == r and np.array_equal(g.values, f.values)


def test_leafset_algebra():
    r = build_root(1, 3)
    A = LeafSet(r, [1, 1, 0, 0, 1, 0, 0, 0])
    B = LeafSet(r, [0, 1, 1, 0, 0, 0, 0, 1])
    assert (A | B).count() == 5 and (A & B).count() == 1
    assert (~A).count() == 5 and (A - B).count() == 2
    assert (A & B) <= A and not A <= B
    assert LeafSet.empty(r).is_empty() and LeafSet.full(r).count() == 8
