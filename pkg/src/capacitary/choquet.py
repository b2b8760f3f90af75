"""Choquet integrals of step functions against the dyadic content.

Every integral is a finite layer cake: with t_1 < ... < t_m the distinct
positive values of f on the region,

    int f dH = sum_j (t_j - t_{j-1}) H({f >= t_j}),   t_0 = 0.

Integrals of phi(|f|) for increasing phi with phi(0) = 0 reuse the same
superlevel sets, so a single profile serves L^p norms, Luxemburg modulars and
averages alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .content import (ContentParams, ball_content_estimate, content_of_cube, dyadic_content,
                      level_weights, region_block)
from .lattice import (Cube, GridFunction, LeafSet, RootCube, as_box, cube_boxes, from_morton, to_morton)


class ChoquetError(ValueError):
    pass


@dataclass(frozen=True)
class Profile:
    """Distinct positive levels ``t`` (ascending) and contents ``H[j] = H({g >= t[j]})``."""

    t: np.ndarray
    H: np.ndarray
    region_content: float

    def integral(self, phi=None, denom: float = 1.0) -> float:
        """Layer-cake value of ``phi(g)`` divided by ``denom``; ``phi`` must vanish at 0."""
        if self.t.size == 0:
            return 0.0
        vals = self.t if phi is None else phi(self.t)
        dphi = np.diff(vals, prepend=0.0)
        w = self.H if denom == 1.0 else self.H / denom
        return math.fsum(dphi * w)


def _morton_values(f, root: RootCube) -> np.ndarray:
    vals = f.values if isinstance(f, GridFunction) else np.asarray(f, float).reshape(root.shape)
    return to_morton(vals, root.n, root.L)


def profile(f: GridFunction, params: ContentParams, over=None, absolute: bool = True) -> Profile:
    """Layer contents of ``|f|`` (or ``f`` itself) on a region."""
    root = f.root
    params.check(root)
    blk = region_block(root, params, over)
    vals = blk.take(_morton_values(f, root))
    if absolute:
        vals = np.abs(vals)
    t, H = _kernels.sweep(np.ascontiguousarray(vals), blk.mask, root.n, blk.weights)
    return Profile(t, H, region_content(root, params, over))


def region_content(root: RootCube, params: ContentParams, over=None) -> float:
    if isinstance(over, LeafSet):
        return dyadic_content(over, params)
    return content_of_cube(over, root, params)


def _region_values(f: GridFunction, over) -> np.ndarray:
    if isinstance(over, LeafSet):
        return f.values[over.mask]
    return f.values[as_box(over, f.root).slices()]


def choquet_integral(f: GridFunction, params: ContentParams, over=None):
    """Exact Choquet integral of a nonnegative step function over a region.

    With the ball flavor the result is an interval ``(lo, hi)`` built from the
    per-layer ball-content intervals.
    """
    if np.any(_region_values(f, over) < 0):
        raise ChoquetError("negative values in the integration region; integrate |f| instead")
    if params.flavor == "ball":
        return _ball_choquet(f, params, over)
    return profile(f, params, over, absolute=False).integral()


def _ball_choquet(f: GridFunction, params: ContentParams, over) -> tuple[float, float]:
    root = f.root
    region = over if isinstance(over, LeafSet) else LeafSet.from_cubes(root, [as_box(over, root)])
    vals = np.where(region.mask, f.values, 0.0)
    levels = np.unique(vals[vals > 0])
    lo, hi = [], []
    prev = 0.0
    for t in levels:
        a, b = ball_content_estimate(LeafSet(root, vals >= t), params)
        lo.append((t - prev) * a)
        hi.append((t - prev) * b)
        prev = t
    return math.fsum(lo), math.fsum(hi)


def lp_quasinorm(f: GridFunction, p: float, params: ContentParams, over=None) -> float:
    if not p > 0:
        raise ChoquetError(f"p must be positive, got {p}")
    prof = profile(f, params, over)
    if prof.t.size == 0:
        return 0.0
    # scale by the largest level so that lp_quasinorm(2^k f) == 2^k lp_quasinorm(f) exactly
    m = float(prof.t[-1])
    val = Profile(prof.t / m, prof.H, prof.region_content).integral(lambda t: t**p)
    return m * val ** (1.0 / p)


def content_average(f: GridFunction, Q, params: ContentParams, denominator: str = "content") -> float:
    """Mean of |f| over Q against the content; denominator H(Q) or side(Q)^beta."""
    root = f.root
    box = as_box(Q, root)
    if denominator == "content":
        denom = content_of_cube(box, root, params)
    elif denominator == "power":
        denom = box.side(root) ** params.beta
    else:
        raise ChoquetError(f"unknown denominator {denominator!r}")
    if denom <= 0:
        raise ChoquetError("degenerate cube")
    return profile(f, params, box).integral(denom=denom)


@dataclass(frozen=True)
class LevelProfile:
    """Right-continuous distribution ``t -> H({|g| > t})`` at 0+ and every distinct level."""

    t: np.ndarray
    content: np.ndarray

    def to_tsv(self, path: str | Path | None = None) -> str:
        lines = ["# t\tcontent"]
        lines += [f"{t!r}\t{h!r}" for t, h in zip(self.t.tolist(), self.content.tolist())]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.content.tolist()))


def level_profile(g: GridFunction, params: ContentParams, over=None) -> LevelProfile:
    prof = profile(g, params, over)
    t = np.concatenate([[0.0], prof.t])
    h = np.concatenate([prof.H, [0.0]])
    return LevelProfile(t, h)


# --- profiles of every cube in a family -------------------------------------------------

@dataclass
class ProfileGroup:
    """Padded profiles ``T, H`` (one row per cube) plus each cube's content and side.

    ``level`` is set for a whole dyadic level (rows in Morton order); otherwise
    ``boxes`` lists the cubes.
    """

    T: np.ndarray
    H: np.ndarray
    content: np.ndarray
    side: np.ndarray
    level: int | None = None
    boxes: list | None = None

    def layer_sum(self, phi=None, denom: np.ndarray | None = None) -> np.ndarray:
        vals = self.T if phi is None else phi(self.T)
        dphi = np.diff(vals, axis=1, prepend=0.0)
        w = self.H if denom is None else self.H / denom[:, None]
        return np.sum(dphi * w, axis=1)


@dataclass
class FamilyProfiles:
    root: RootCube
    groups: list[ProfileGroup]

    def scatter_max(self, values: list[np.ndarray]) -> np.ndarray:
        """Per-leaf maximum of per-cube values over the cubes containing each leaf."""
        root = self.root
        morton = np.full(root.num_leaves, -np.inf)
        grid = np.full(root.shape, -np.inf)
        for g, v in zip(self.groups, values):
            if g.level is not None:
                size = 1 << (root.n * (root.L - g.level))
                np.maximum(morton, np.repeat(v, size), out=morton)
            else:
                for box, x in zip(g.boxes, v):
                    sl = box.slices()
                    np.maximum(grid[sl], x, out=grid[sl])
        return np.maximum(from_morton(morton, root.n, root.L), grid)


def family_profiles(f: GridFunction, params: ContentParams, family: str = "dyadic", **kw) -> FamilyProfiles:
    """Profiles of ``|f|`` on every cube of a family, grouped for vectorized evaluation."""
    root = f.root
    params.check(root)
    vals = np.abs(_morton_values(f, root))
    W = level_weights(root, params)
    groups = []
    if family == "dyadic":
        for k in range(root.L + 1):
            T, H, _ = _kernels.level_profiles(vals, root.n, root.L, k, W)
            K = T.shape[0]
            groups.append(ProfileGroup(T, H, np.full(K, W[k]), np.full(K, root.level_side(k)), level=k))
        return FamilyProfiles(root, groups)
    boxes = cube_boxes(root, family, on_budget=kw.get("on_budget", "subsample"),
                       budget=kw.get("budget", 20_000), seed=kw.get("seed", 0))
    by_size: dict[int, list[Cube]] = {}
    for b in boxes:
        by_size.setdefault(b.size, []).append(b)
    for size in sorted(by_size, reverse=True):
        rows_t, rows_h, cont = [], [], []
        for box in by_size[size]:
            blk = region_block(root, params, box)
            t, H = _kernels.sweep(np.ascontiguousarray(blk.take(vals)), blk.mask, root.n, blk.weights)
            rows_t.append(t)
            rows_h.append(H)
            cont.append(content_of_cube(box, root, params))
        width = max(1, max(len(t) for t in rows_t))
        T = np.zeros((len(rows_t), width))
        Hm = np.zeros_like(T)
        for i, (t, H) in enumerate(zip(rows_t, rows_h)):
            T[i, :len(t)] = t
            T[i, len(t):] = t[-1] if len(t) else 0.0
            Hm[i, :len(H)] = H
        groups.append(ProfileGroup(T, Hm, np.array(cont), np.full(len(rows_t), size * root.h),
                                   boxes=by_size[size]))
    return FamilyProfiles(root, groups)
