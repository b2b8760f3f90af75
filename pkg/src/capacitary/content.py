"""Dyadic Hausdorff content by minimal-cover dynamic programming.

For a set E of leaf cells, the dyadic content is the cheapest cover of E by
dyadic cubes of the root lattice, each cube Q costing ``side(Q)**beta``. The
tree DP sets cost(Q) = min(side(Q)**beta, sum of children costs), with empty
subtrees costing 0 and leaves meeting E costing their own weight.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .lattice import (DyadicCube, LeafSet, RootCube, as_box, dyadic_container, morton_block,
                      morton_coords, to_morton)


class ContentError(ValueError):
    pass


class InfeasibleSize(ContentError):
    pass


FLAVORS = ("dyadic", "ball")


def omega(beta: float) -> float:
    """Normalization of the ball content, pi^(beta/2) / Gamma(beta/2 + 1)."""
    return math.pi ** (beta / 2) / math.gamma(beta / 2 + 1)


@dataclass(frozen=True)
class ContentParams:
    beta: float
    flavor: str = "dyadic"
    cstar: float | None = None
    omega_beta: float = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.beta <= 3:
            raise ContentError(f"beta must lie in (0, n], got {self.beta}")
        if self.flavor not in FLAVORS:
            raise ContentError(f"unknown content flavor {self.flavor!r}")
        object.__setattr__(self, "omega_beta", omega(self.beta))

    def check(self, root: RootCube) -> None:
        if self.beta > root.n:
            raise ContentError(f"beta={self.beta} exceeds the dimension n={root.n}")

    def comparability(self, n: int) -> float:
        """The configured constant C* relating dyadic and ball contents."""
        if self.cstar is not None:
            return float(self.cstar)
        return 2.0**self.beta * n ** (self.beta / 2) * max(1.0, 1.0 / self.omega_beta)


@dataclass(frozen=True)
class CoverWitness:
    cubes: tuple[DyadicCube, ...]
    weight: float

    def to_json(self) -> str:
        return json.dumps({"cubes": [Q.to_json() for Q in self.cubes], "weight": self.weight})

    @classmethod
    def from_json(cls, text: str) -> "CoverWitness":
        d = json.loads(text)
        return cls(tuple(DyadicCube(c["level"], tuple(c["coords"])) for c in d["cubes"]), d["weight"])


@lru_cache(maxsize=256)
def _weights(side: float, L: int, beta: float) -> np.ndarray:
    w = np.array([(side * 2.0**-k) ** beta for k in range(L + 1)])
    w.setflags(write=False)
    return w


def level_weights(root: RootCube, params: ContentParams) -> np.ndarray:
    """``W[k] = side(Q)**beta`` for cubes of level ``k``."""
    return _weights(root.side, root.L, params.beta)


# --- integration regions -------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    """A region expressed inside one dyadic block: Morton slice, mask and weights."""

    start: int
    length: int
    level: int
    mask: np.ndarray
    weights: np.ndarray

    def take(self, morton_values: np.ndarray) -> np.ndarray:
        return morton_values[self.start:self.start + self.length]


def region_block(root: RootCube, params: ContentParams, over=None) -> Block:
    """Locate ``over`` (None, a cube, or a LeafSet) inside its smallest dyadic container."""
    W = level_weights(root, params)
    if isinstance(over, LeafSet):
        if over.root != root:
            raise ContentError("leaf set lives on a different root")
        return Block(0, root.num_leaves, 0, to_morton(over.mask, root.n, root.L), W)
    box = as_box(over, root)
    dy = box.dyadic(root)
    if dy is not None:
        start, length = morton_block(dy, root.L)
        return Block(start, length, dy.level, _ones(length), W[dy.level:])
    D = dyadic_container(box, root)
    start, length = morton_block(D, root.L)
    xy = morton_coords(root.n, root.L)[start:start + length]
    lo = np.array(box.lo)
    mask = np.all((xy >= lo) & (xy < lo + box.size), axis=1)
    return Block(start, length, D.level, mask, W[D.level:])


@lru_cache(maxsize=64)
def _ones(length: int) -> np.ndarray:
    m = np.ones(length, bool)
    m.setflags(write=False)
    return m


# --- exact content -----------------------------------------------------------------

def _as_leafset(E, root: RootCube | None = None) -> LeafSet:
    if isinstance(E, LeafSet):
        return E
    if root is None:
        raise ContentError("a root is needed to interpret a raw mask")
    return LeafSet(root, E)


def dyadic_content(E: LeafSet, params: ContentParams) -> float:
    """Exact dyadic Hausdorff content of a leaf set."""
    root = E.root
    params.check(root)
    member = to_morton(E.mask, root.n, root.L)
    cost = _kernels.batch_costs(member, root.n, level_weights(root, params))
    return float(cost[0])


def content_of_cube(Q, root: RootCube, params: ContentParams) -> float:
    box = as_box(Q, root)
    if box.dyadic(root) is not None:
        return float(level_weights(root, params)[root.L - (box.size.bit_length() - 1)])
    return dyadic_content(LeafSet.from_cubes(root, [box]), params)


def minimal_cover(E: LeafSet, params: ContentParams) -> CoverWitness:
    """Canonical optimal dyadic cover; ties between a cube and its children go to the cube."""
    root = E.root
    params.check(root)
    n, L = root.n, root.L
    W = level_weights(root, params)
    member = to_morton(E.mask, n, L)
    cost = _kernels.batch_costs(member, n, W)
    offs = np.concatenate([[0], np.cumsum([1 << (n * k) for k in range(L + 1)])])
    cubes = []
    stack = [(0, 0)]
    while stack:
        k, p = stack.pop()
        c = cost[offs[k] + p]
        if c == 0.0:
            continue
        if k == L:
            cubes.append(_decode(k, p, n))
            continue
        base = offs[k + 1] + (p << n)
        s = cost[base]
        for j in range(1, 1 << n):
            s += cost[base + j]
        if W[k] <= s:
            cubes.append(_decode(k, p, n))
        else:
            stack.extend((k + 1, (p << n) + j) for j in range((1 << n) - 1, -1, -1))
    cubes.sort()
    return CoverWitness(tuple(cubes), float(cost[0]))


def _decode(k: int, p: int, n: int) -> DyadicCube:
    coords = [0] * n
    for b in range(k):
        digit = (p >> (n * b)) & ((1 << n) - 1)
        for d in range(n):
            coords[d] |= ((digit >> (n - 1 - d)) & 1) << b
    return DyadicCube(k, tuple(coords))


def content_oracle(E: LeafSet, params: ContentParams, max_level: int | None = None,
                   guard: int = 2**17) -> float:
    """Brute force: the cheapest weight over every antichain of dyadic cubes covering E.

    Cubes disjoint from E never lower a cover's weight, so the enumeration
    ranges over antichains of cubes meeting E. Weights of a union of
    sub-antichains are added child by child in the same order as the DP, which
    makes equal optima bit-identical.
    """
    root = E.root
    params.check(root)
    n, L = root.n, root.L
    depth = L if max_level is None else int(max_level)
    if not 0 <= depth <= L:
        raise ContentError("max_level must lie in [0, L]")
    W = level_weights(root, params)
    member = to_morton(E.mask, n, L)

    def occupied(k, p):
        size = 1 << (n * (L - k))
        return bool(member[p * size:(p + 1) * size].any())

    def count(k, p):
        if not occupied(k, p):
            return 1
        if k == depth:
            return 1
        prod = 1
        for c in range(1 << n):
            prod *= count(k + 1, (p << n) + c)
            if prod > guard:
                raise InfeasibleSize(f"more than {guard} antichains")
        return 1 + prod

    total = count(0, 0)
    if total > guard:
        raise InfeasibleSize(f"{total} antichains exceed the guard {guard}")

    def weights(k, p):
        if not occupied(k, p):
            return np.zeros(1)
        if k == depth:
            return np.array([W[k]])
        acc = weights(k + 1, p << n)
        for c in range(1, 1 << n):
            acc = (acc[:, None] + weights(k + 1, (p << n) + c)[None, :]).ravel()
        return np.concatenate([[W[k]], acc])

    return float(weights(0, 0).min())


def ball_content_estimate(E: LeafSet, params: ContentParams) -> tuple[float, float]:
    """Interval enclosing the ball-normalized content of E.

    ``[H/C*, C*·H]`` from the configured comparability constant, with the upper
    end lowered to a greedy cover by the circumscribed balls of the optimal
    dyadic witness when that is smaller.
    """
    if params.flavor != "ball":
        raise ContentError("ball_content_estimate expects flavor='ball'")
    root = E.root
    if E.is_empty():
        return 0.0, 0.0
    wit = minimal_cover(E, params)
    C = params.comparability(root.n)
    r = [math.sqrt(root.n) * Q.side(root) / 2 for Q in wit.cubes]
    greedy = math.fsum(params.omega_beta * x**params.beta for x in r)
    return wit.weight / C, min(C * wit.weight, greedy)
