"""Mean oscillation against the dyadic content and the BMO^beta norm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .content import ContentParams, level_weights, region_block
from .lattice import GridFunction, RootCube, as_box, cube_boxes, dilate, from_morton, to_morton


class BMOError(ValueError):
    pass


@dataclass(frozen=True)
class Oscillation:
    """``value`` = inf_c (side^-beta int_Q |b - c|^p)^(1/p); ``c_star`` its canonical minimizer.

    ``interior`` flags cubes where the golden-section refinement found a
    constant strictly better than every data value; ``scan_value`` is the
    best data-value candidate, normalized like ``value``.
    """

    value: float
    c_star: float
    interior: bool = False
    scan_value: float = 0.0

    def __iter__(self):
        yield self.value
        yield self.c_star


def _normalize(raw: float, side: float, beta: float, p: float) -> float:
    x = raw / side**beta
    return x if p == 1 else x ** (1.0 / p)


def oscillation(b: GridFunction, Q, params: ContentParams, p: float = 1.0, full_scan: bool = False) -> Oscillation:
    root = b.root
    params.check(root)
    if p < 1:
        raise BMOError("oscillation exponent p must be >= 1")
    box = as_box(Q, root)
    blk = region_block(root, params, box)
    vals = np.ascontiguousarray(blk.take(to_morton(b.values, root.n, root.L)))
    raw, c, interior, scan = _kernels.oscillation(vals, blk.mask, root.n, blk.weights, float(p), full_scan)
    side = box.side(root)
    return Oscillation(_normalize(raw, side, params.beta, p), float(c), bool(interior),
                       _normalize(scan, side, params.beta, p))


@dataclass
class FamilyOscillations:
    """Per-cube oscillations grouped like ``FamilyProfiles`` (levels or box lists)."""

    root: RootCube
    groups: list  # (level or None, boxes or None, value, c_star, interior)

    def scatter_max(self) -> np.ndarray:
        root = self.root
        morton = np.zeros(root.num_leaves)
        grid = np.zeros(root.shape)
        for level, boxes, value, _, _ in self.groups:
            if level is not None:
                size = 1 << (root.n * (root.L - level))
                np.maximum(morton, np.repeat(value, size), out=morton)
            else:
                for box, v in zip(boxes, value):
                    sl = box.slices()
                    np.maximum(grid[sl], v, out=grid[sl])
        return np.maximum(from_morton(morton, root.n, root.L), grid)

    def max(self) -> float:
        return max(float(np.max(g[2])) for g in self.groups)

    def interior_count(self) -> int:
        return int(sum(np.count_nonzero(g[4]) for g in self.groups))


def family_oscillations(b: GridFunction, params: ContentParams, family: str = "dyadic", p: float = 1.0,
                        full_scan: bool = False, **kw) -> FamilyOscillations:
    root = b.root
    params.check(root)
    vals = to_morton(b.values, root.n, root.L)
    W = level_weights(root, params)
    groups = []
    if family == "dyadic":
        for k in range(root.L + 1):
            raw, c, interior = _kernels.level_oscillations(vals, root.n, root.L, k, W, float(p), full_scan)
            side = root.level_side(k)
            value = raw / side**params.beta
            if p != 1:
                value = value ** (1.0 / p)
            groups.append((k, None, value, c, interior))
        return FamilyOscillations(root, groups)
    boxes = cube_boxes(root, family, on_budget=kw.get("on_budget", "subsample"),
                       budget=kw.get("budget", 20_000), seed=kw.get("seed", 0))
    value = np.empty(len(boxes))
    cstar = np.empty(len(boxes))
    interior = np.zeros(len(boxes), bool)
    for i, box in enumerate(boxes):
        blk = region_block(root, params, box)
        raw, c, it, _ = _kernels.oscillation(np.ascontiguousarray(blk.take(vals)), blk.mask, root.n,
                                             blk.weights, float(p), full_scan)
        value[i] = _normalize(raw, box.side(root), params.beta, p)
        cstar[i] = c
        interior[i] = it
    groups.append((None, boxes, value, cstar, interior))
    return FamilyOscillations(root, groups)


def bmo_norm(b: GridFunction, params: ContentParams, family: str = "dyadic", p: float = 1.0, **kw) -> float:
    """sup over the family of the cube oscillations."""
    return family_oscillations(b, params, family, p, **kw).max()


def lebesgue_bmo_norm(b: GridFunction) -> float:
    """Dyadic BMO norm with Lebesgue averages, sup_Q inf_c |Q|^-1 int_Q |b - c|.

    For equal cell volumes the inner infimum is attained at a median of the
    cell values, which is how it is evaluated here.
    """
    root = b.root
    best = 0.0
    for k in range(root.L + 1):
        s = 1 << (root.L - k)
        blocks = b.values.reshape((1 << k, s) * root.n)
        axes_out = tuple(range(0, 2 * root.n, 2))
        axes_in = tuple(range(1, 2 * root.n, 2))
        blocks = np.transpose(blocks, axes_out + axes_in).reshape((1 << (root.n * k)), -1)
        med = np.median(blocks, axis=1, keepdims=True)
        osc = np.mean(np.abs(blocks - med), axis=1)
        best = max(best, float(osc.max()))
    return best


def truncate(b: GridFunction, k: float) -> GridFunction:
    if not k > 0:
        raise BMOError("truncation level must be positive")
    return GridFunction(b.root, np.clip(b.values, -k, k))


def shifted_mean_gap(b: GridFunction, Q, k: int, params: ContentParams) -> float:
    """|b_{2^k Q} - b_Q| with the canonical oscillation minimizers as b_Q.

    The dilation keeps the center of Q, is capped at the root side, and is
    translated to lie inside the root, so it is again a cube containing Q.
    """
    if k < 0:
        raise BMOError("dilation exponent must be >= 0")
    if k == 0:
        return 0.0
    root = b.root
    big = dilate(Q, k, root)
    return abs(oscillation(b, big, params).c_star - oscillation(b, Q, params).c_star)
