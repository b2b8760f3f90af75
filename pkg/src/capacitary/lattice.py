"""Dyadic geometry on a root cube.

A root cube Q0 of side ``side`` is split into ``2**L`` cells per axis. Grid
functions are cell-constant and stored as n-dimensional arrays indexed by
cell coordinates (row-major when flattened). Internally the cells are also
visited in Morton (Z-)order, where every dyadic cube is a contiguous block;
the content and oscillation kernels rely on that layout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_LEAF_BUDGET = 2**20
DEFAULT_CUBE_BUDGET = 20_000

FAMILIES = ("dyadic", "shifted-dyadic", "grid-aligned-all")


class LatticeError(ValueError):
    pass


class BudgetExceeded(LatticeError):
    pass


@dataclass(frozen=True)
class RootCube:
    n: int
    L: int
    side: float = 1.0
    origin: tuple[float, ...] = ()

    @property
    def per_axis(self) -> int:
        return 1 << self.L

    @property
    def num_leaves(self) -> int:
        return 1 << (self.n * self.L)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.per_axis,) * self.n

    @property
    def h(self) -> float:
        """Leaf side length."""
        return self.side / self.per_axis

    def level_side(self, k: int) -> float:
        return self.side * 2.0**-k

    def cell_centers(self) -> list[np.ndarray]:
        """Per-axis arrays of cell-center coordinates."""
        idx = np.arange(self.per_axis) + 0.5
        return [self.origin[d] + idx * self.h for d in range(self.n)]

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.cell_centers(), indexing="ij"))

    def refined(self, extra: int = 1) -> "RootCube":
        return RootCube(self.n, self.L + extra, self.side, self.origin)


def build_root(n: int, L: int, side: float = 1.0, origin: Sequence[float] | float | None = None,
               budget: int = DEFAULT_LEAF_BUDGET) -> RootCube:
    if n not in (1, 2, 3):
        raise LatticeError(f"invalid dimension n={n}; expected 1, 2 or 3")
    if L < 1:
        raise LatticeError(f"leaf depth L must be >= 1, got {L}")
    if not side > 0:
        raise LatticeError(f"side must be positive, got {side}")
    if 2 ** (n * L) > budget:
        raise BudgetExceeded(f"2^{n * L} leaves exceed the budget {budget}")
    if origin is None:
        origin = (0.0,) * n
    elif np.isscalar(origin):
        origin = (float(origin),) * n
    origin = tuple(float(o) for o in origin)
    if len(origin) != n:
        raise LatticeError("origin length does not match n")
    return RootCube(n, L, float(side), origin)


@dataclass(frozen=True, order=True)
class Cube:
    """Axis-aligned cube in leaf units: lower corner ``lo`` and ``size`` cells per side."""

    lo: tuple[int, ...]
    size: int

    def box(self, root: RootCube) -> "Cube":
        return self

    @property
    def hi(self) -> tuple[int, ...]:
        return tuple(a + self.size for a in self.lo)

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(a, a + self.size) for a in self.lo)

    def side(self, root: RootCube) -> float:
        return self.size * root.h

    def contains_leaf(self, leaf: Sequence[int]) -> bool:
        return all(a <= i < a + self.size for a, i in zip(self.lo, leaf))

    def contains(self, other: "Cube") -> bool:
        return all(a <= b and b + other.size <= a + self.size for a, b in zip(self.lo, other.lo))

    def inside(self, root: RootCube) -> bool:
        return len(self.lo) == root.n and self.size >= 1 and all(
            0 <= a and a + self.size <= root.per_axis for a in self.lo)

    def dyadic(self, root: RootCube) -> "DyadicCube | None":
        """The dyadic cube with the same cells, if there is one."""
        s = self.size
        if s & (s - 1) or any(a % s for a in self.lo):
            return None
        k = root.L - (s.bit_length() - 1)
        return DyadicCube(k, tuple(a // s for a in self.lo))


@dataclass(frozen=True, order=True)
class DyadicCube:
    level: int
    coords: tuple[int, ...]

    def box(self, root: RootCube) -> Cube:
        s = 1 << (root.L - self.level)
        return Cube(tuple(c * s for c in self.coords), s)

    def side(self, root: RootCube) -> float:
        return root.level_side(self.level)

    def parent(self) -> "DyadicCube":
        if self.level == 0:
            raise LatticeError("the root has no parent")
        return DyadicCube(self.level - 1, tuple(c >> 1 for c in self.coords))

    def children(self) -> list["DyadicCube"]:
        n = len(self.coords)
        return [DyadicCube(self.level + 1, tuple(2 * c + b for c, b in zip(self.coords, bits)))
                for bits in itertools.product((0, 1), repeat=n)]

    def to_json(self) -> dict:
        return {"level": self.level, "coords": list(self.coords)}


def as_box(Q, root: RootCube) -> Cube:
    if Q is None:
        return Cube((0,) * root.n, root.per_axis)
    box = Q.box(root)
    if not box.inside(root):
        raise LatticeError(f"cube {Q} lies outside the root")
    return box


# --- grid functions and leaf sets -------------------------------------------------

@dataclass(frozen=True)
class GridFunction:
    root: RootCube
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(self.root.shape)
        if not np.all(np.isfinite(v)):
            raise LatticeError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, root: RootCube, fn) -> "GridFunction":
        """Sample ``fn(*coords)`` at the cell centers."""
        return cls(root, fn(*root.mesh()))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def map(self, fn) -> "GridFunction":
        return GridFunction(self.root, fn(self.values))

    def __add__(self, other):
        return GridFunction(self.root, self.values + _vals(other))

    def __sub__(self, other):
        return GridFunction(self.root, self.values - _vals(other))

    def __mul__(self, other):
        return GridFunction(self.root, self.values * _vals(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.root, -self.values)

    def __abs__(self):
        return GridFunction(self.root, np.abs(self.values))


def _vals(x):
    return x.values if isinstance(x, GridFunction) else x


@dataclass(frozen=True)
class LeafSet:
    root: RootCube
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool).reshape(self.root.shape)
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @classmethod
    def empty(cls, root: RootCube) -> "LeafSet":
        return cls(root, np.zeros(root.shape, bool))

    @classmethod
    def full(cls, root: RootCube) -> "LeafSet":
        return cls(root, np.ones(root.shape, bool))

    @classmethod
    def from_cubes(cls, root: RootCube, cubes: Iterable) -> "LeafSet":
        m = np.zeros(root.shape, bool)
        for Q in cubes:
            m[as_box(Q, root).slices()] = True
        return cls(root, m)

    def __or__(self, other: "LeafSet") -> "LeafSet":
        return LeafSet(self.root, self.mask | other.mask)

    def __and__(self, other: "LeafSet") -> "LeafSet":
        return LeafSet(self.root, self.mask & other.mask)

    def __invert__(self) -> "LeafSet":
        return LeafSet(self.root, ~self.mask)

    def __sub__(self, other: "LeafSet") -> "LeafSet":
        return LeafSet(self.root, self.mask & ~other.mask)

    def __le__(self, other: "LeafSet") -> bool:
        return bool(np.all(~self.mask | other.mask))

    def count(self) -> int:
        return int(self.mask.sum())

    def is_empty(self) -> bool:
        return not self.mask.any()


def restrict(f: GridFunction, Q) -> np.ndarray:
    """Read-only view of the values of ``f`` on the cells of ``Q``."""
    view = f.values[as_box(Q, f.root).slices()]
    view.setflags(write=False)
    return view


# --- Morton layout -----------------------------------------------------------------

@lru_cache(maxsize=32)
def morton_order(n: int, L: int) -> np.ndarray:
    """``order[m]`` is the row-major flat index of the cell with Morton index ``m``.

    Morton digits are read from the coarsest level down; within one digit the
    child offsets are ordered row-major (axis 0 most significant).
    """
    N = 1 << L
    grids = np.meshgrid(*([np.arange(N)] * n), indexing="ij")
    code = np.zeros(N**n, dtype=np.int64)
    for b in range(L):
        digit = np.zeros(N**n, dtype=np.int64)
        for d in range(n):
            digit |= ((grids[d].reshape(-1) >> b) & 1) << (n - 1 - d)
        code |= digit << (n * b)
    order = np.argsort(code, kind="stable")
    order.setflags(write=False)
    return order


@lru_cache(maxsize=32)
def morton_coords(n: int, L: int) -> np.ndarray:
    """Cell coordinates listed in Morton order, shape ``(N**n, n)``."""
    N = 1 << L
    flat = morton_order(n, L)
    out = np.stack(np.unravel_index(flat, (N,) * n), axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


def to_morton(values: np.ndarray, n: int, L: int) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(values).reshape(-1)[morton_order(n, L)])


def from_morton(values: np.ndarray, n: int, L: int) -> np.ndarray:
    out = np.empty(len(values), dtype=np.asarray(values).dtype)
    out[morton_order(n, L)] = values
    return out.reshape((1 << L,) * n)


def morton_block(cube: DyadicCube, L: int) -> tuple[int, int]:
    """Start and length of a dyadic cube's contiguous Morton block."""
    n = len(cube.coords)
    code = 0
    for b in range(cube.level):
        digit = 0
        for d, c in enumerate(cube.coords):
            digit |= ((c >> b) & 1) << (n - 1 - d)
        code |= digit << (n * b)
    length = 1 << (n * (L - cube.level))
    return code * length, length


def dyadic_container(box: Cube, root: RootCube) -> DyadicCube:
    """Smallest dyadic cube containing ``box``."""
    for k in range(root.L, -1, -1):
        s = 1 << (root.L - k)
        if all(a // s == (a + box.size - 1) // s for a in box.lo):
            return DyadicCube(k, tuple(a // s for a in box.lo))
    return DyadicCube(0, (0,) * root.n)


# --- cube families -------------------------------------------------------------------

def enumerate_cubes(root: RootCube, family: str = "dyadic", containing: int | Sequence[int] | None = None,
                    budget: int = DEFAULT_CUBE_BUDGET, on_budget: str = "error",
                    seed: int = 0) -> list:
    """All cubes of a family, ordered by level (coarse first) and then by position.

    ``containing`` filters to cubes that contain a leaf, given as a flat
    row-major index or a coordinate tuple. For ``grid-aligned-all`` the count
    is checked against ``budget``; ``on_budget="subsample"`` keeps a uniform
    seeded subsample instead of raising.
    """
    leaf = None
    if containing is not None:
        leaf = (tuple(int(x) for x in np.unravel_index(int(containing), root.shape))
                if np.isscalar(containing) else tuple(int(x) for x in containing))
    if family == "dyadic":
        if leaf is not None:
            return [DyadicCube(k, tuple(i >> (root.L - k) for i in leaf)) for k in range(root.L + 1)]
        return [DyadicCube(k, c) for k in range(root.L + 1)
                for c in itertools.product(range(1 << k), repeat=root.n)]
    if family == "shifted-dyadic":
        cubes = _shifted_boxes(root)
    elif family == "grid-aligned-all":
        N = root.per_axis
        total = sum((N - s + 1) ** root.n for s in range(1, N + 1))
        if leaf is None and total > budget:
            if on_budget != "subsample":
                raise BudgetExceeded(f"{total} grid-aligned cubes exceed the budget {budget}")
            return _subsample_all(root, total, budget, seed)
        cubes = [Cube(lo, s) for s in range(N, 0, -1) for lo in itertools.product(range(N - s + 1), repeat=root.n)]
    else:
        raise LatticeError(f"unknown cube family {family!r}")
    if leaf is not None:
        cubes = [Q for Q in cubes if Q.contains_leaf(leaf)]
    return cubes


def _shifted_boxes(root: RootCube) -> list[Cube]:
    # Shifting a level-k lattice by -1/2 or +1/2 of its side gives the same cubes,
    # so the 3^n half-shifted lattices contribute 2^n distinct lattices per level.
    N = root.per_axis
    seen = set()
    out = []
    for k in range(root.L + 1):
        s = 1 << (root.L - k)
        offsets = (0, s // 2) if s >= 2 else (0,)
        for shift in itertools.product(offsets, repeat=root.n):
            ranges = [range(o, N - s + 1, s) for o in shift]
            for lo in itertools.product(*ranges):
                if (s, lo) not in seen:
                    seen.add((s, lo))
                    out.append(Cube(lo, s))
    out.sort(key=lambda Q: (-Q.size, Q.lo))
    return out


def _subsample_all(root: RootCube, total: int, budget: int, seed: int) -> list[Cube]:
    N = root.per_axis
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(total, size=budget, replace=False))
    sizes = np.arange(N, 0, -1)
    counts = (N - sizes + 1) ** root.n
    starts = np.concatenate([[0], np.cumsum(counts)])
    out = []
    for p in picks:
        j = int(np.searchsorted(starts, p, side="right") - 1)
        s = int(sizes[j])
        lo = np.unravel_index(int(p - starts[j]), (N - s + 1,) * root.n)
        out.append(Cube(tuple(int(x) for x in lo), s))
    return out


def cube_boxes(root: RootCube, family: str, **kw) -> list[Cube]:
    return [as_box(Q, root) for Q in enumerate_cubes(root, family, **kw)]


def dilate(Q, k: int, root: RootCube) -> Cube:
    """The cube 2^k Q with the same center, shrunk to the root side if needed
    and translated to lie inside the root (it still contains Q)."""
    box = as_box(Q, root)
    if k < 0:
        raise LatticeError("dilation exponent must be >= 0")
    N = root.per_axis
    size = min(box.size << k, N)
    lo = []
    for a in box.lo:
        start = a - (size - box.size) // 2
        lo.append(min(max(start, 0), N - size))
    return Cube(tuple(lo), size)


def centered_dilation(Q, k: int, root: RootCube) -> LeafSet:
    """Cells of the centered dilation 2^k Q intersected with the root (not translated)."""
    box = as_box(Q, root)
    m = np.zeros(root.shape, bool)
    grow = ((box.size << k) - box.size) / 2
    sl = []
    for a in box.lo:
        lo = max(int(math.floor(a - grow)), 0)
        hi = min(int(math.ceil(a + box.size + grow)), root.per_axis)
        sl.append(slice(lo, hi))
    m[tuple(sl)] = True
    return LeafSet(root, m)


# --- file formats -----------------------------------------------------------------------

def write_grid(f: GridFunction, path: str | Path) -> None:
    """Write a grid function; ``.bin``/``.f64`` selects raw little-endian float64
    (with a sidecar header line), anything else the text format."""
    path = Path(path)
    r = f.root
    header = " ".join([str(r.n), str(r.L), repr(r.side)] + [repr(o) for o in r.origin])
    if path.suffix in (".bin", ".f64"):
        with open(path, "wb") as fh:
            fh.write((header + "\n").encode())
            fh.write(np.ascontiguousarray(f.flat, dtype="<f8").tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for v in f.flat:
                fh.write(repr(float(v)) + "\n")


def read_grid(path: str | Path) -> GridFunction:
    path = Path(path)
    if path.suffix in (".bin", ".f64"):
        raw = path.read_bytes()
        nl = raw.index(b"\n")
        root = _parse_header(raw[:nl].decode())
        vals = np.frombuffer(raw[nl + 1:], dtype="<f8")
    else:
        lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
        root = _parse_header(lines[0])
        vals = np.array([float(x) for x in lines[1:]])
    if vals.size != root.num_leaves:
        raise LatticeError(f"expected {root.num_leaves} values, found {vals.size}")
    return GridFunction(root, vals)


def read_leafset(path: str | Path) -> LeafSet:
    g = read_grid(path)
    return LeafSet(g.root, g.values != 0)


def write_leafset(E: LeafSet, path: str | Path) -> None:
    write_grid(GridFunction(E.root, E.mask.astype(float)), path)


def _parse_header(line: str) -> RootCube:
    parts = line.split()
    n, L = int(parts[0]), int(parts[1])
    side = float(parts[2])
    origin = [float(x) for x in parts[3:3 + n]] or None
    return build_root(n, L, side, origin)
