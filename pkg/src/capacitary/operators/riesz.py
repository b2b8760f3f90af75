"""Discrete Riesz potentials and commutators on the leaf grid.

(I_alpha f)_i = sum_j K(i - j) f_j h^n with K(z) = |h z|^(alpha - n) for z != 0
and K(0) = c_self h^(alpha - n), where c_self is the mean of |z|^(alpha - n)
over the unit cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.special import comb

from .. import _kernels
from ..content import ContentParams, level_weights
from ..lattice import GridFunction, RootCube, to_morton

METHODS = ("direct", "fft")


class RieszError(ValueError):
    pass


@lru_cache(maxsize=64)
def self_cell_constant(n: int, alpha: float, order: int = 16) -> float:
    """Mean of |z|^(alpha-n) over [-1/2, 1/2]^n.

    Split the cell into 2n pyramids with apex at the origin. Over the pyramid
    on a face at distance a = 1/2, integrating along rays gives
    (a/alpha) * (integral of |y|^(alpha-n) over the face), a smooth integrand
    handled by tensor Gauss-Legendre quadrature.
    """
    if not 0 < alpha < n:
        raise RieszError(f"alpha must lie in (0, {n})")
    a = 0.5
    if n == 1:
        return 2 * (a / alpha) * a ** (alpha - 1)
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.25 * (x + 1)  # nodes on [0, 1/2]
    w = 0.25 * w
    grids = np.meshgrid(*([x] * (n - 1)), indexing="ij")
    weights = np.prod(np.meshgrid(*([w] * (n - 1)), indexing="ij"), axis=0)
    r2 = a * a + sum(g * g for g in grids)
    face = 2 ** (n - 1) * float(np.sum(weights * r2 ** ((alpha - n) / 2)))
    return 2 * n * (a / alpha) * face


@dataclass(frozen=True)
class RieszParams:
    alpha: float
    method: str = "fft"
    self_cell: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise RieszError(f"unknown method {self.method!r}")
        if not self.alpha > 0:
            raise RieszError("alpha must be positive")

    def self_cell_constant(self, n: int) -> float:
        if self.self_cell is not None:
            return float(self.self_cell)
        return self_cell_constant(n, float(self.alpha))

    def check(self, root: RootCube) -> None:
        if not 0 < self.alpha < root.n:
            raise RieszError(f"alpha={self.alpha} outside (0, {root.n})")


def kernel_array(root: RootCube, rp: RieszParams) -> np.ndarray:
    """K on all offsets z in [-(N-1), N-1]^n; offset 0 sits at index N-1 on each axis."""
    return _kernel_array(root.n, root.L, root.h, float(rp.alpha), rp.self_cell_constant(root.n))


@lru_cache(maxsize=32)
def _kernel_array(n, L, h, alpha, c_self):
    N = 1 << L
    z = np.arange(-(N - 1), N) * h
    grids = np.meshgrid(*([z] * n), indexing="ij")
    r2 = sum(g * g for g in grids)
    with np.errstate(divide="ignore"):
        K = r2 ** ((alpha - n) / 2)
    K[(N - 1,) * n] = c_self * h ** (alpha - n)
    K.setflags(write=False)
    return K


@lru_cache(maxsize=32)
def _kernel_fft(n, L, h, alpha, c_self):
    N = 1 << L
    K = _kernel_array(n, L, h, alpha, c_self)
    M = 2 * N
    Kc = np.zeros((M,) * n)
    # offset z goes to index z mod M
    idx = np.concatenate([np.arange(N - 1, 2 * N - 1), np.arange(0, N - 1)])
    dest = np.concatenate([np.arange(0, N), np.arange(N + 1, M)])
    Kc[np.ix_(*([dest] * n))] = K[np.ix_(*([idx] * n))]
    return sfft.rfftn(Kc)


def _vals(f):
    return f.values if isinstance(f, GridFunction) else np.asarray(f, float)


def riesz_potential(f: GridFunction, rp: RieszParams) -> GridFunction:
    root = f.root
    rp.check(root)
    return GridFunction(root, _riesz_values(root, _vals(f), rp))


def _riesz_values(root: RootCube, vals: np.ndarray, rp: RieszParams, method: str | None = None) -> np.ndarray:
    n, N, h = root.n, root.per_axis, root.h
    method = method or rp.method
    if not np.any(vals):
        return np.zeros(root.shape)
    if method == "fft":
        F = sfft.rfftn(vals, s=(2 * N,) * n)
        Kf = _kernel_fft(n, root.L, h, float(rp.alpha), rp.self_cell_constant(n))
        out = sfft.irfftn(F * Kf, s=(2 * N,) * n)[(slice(0, N),) * n]
        return out * h**n
    K = kernel_array(root, rp)
    out = np.zeros(root.shape)
    for j in zip(*np.nonzero(vals)):
        window = tuple(slice(N - 1 - a, 2 * N - 1 - a) for a in j)
        out += vals[j] * K[window]
    return out * h**n


def beta_riesz_potential(f: GridFunction, alpha: float, params: ContentParams,
                         self_cell: float | None = None) -> GridFunction:
    """x -> integral of f(y) |x - y|^(alpha - n) dH(y), one layer cake per target cell."""
    root = f.root
    params.check(root)
    vals = _vals(f)
    if np.any(vals < 0):
        raise RieszError("beta-dimensional Riesz potential expects f >= 0")
    rp = RieszParams(alpha, "direct", self_cell)
    rp.check(root)
    K = kernel_array(root, rp)
    N = root.per_axis
    W = level_weights(root, params)
    mask = np.ones(root.num_leaves, bool)
    out = np.zeros(root.shape)
    if not np.any(vals):
        return GridFunction(root, out)
    for i in np.ndindex(*root.shape):
        # the kernel is even, so this window holds K(y - i) = K(i - y) at y
        ker = K[tuple(slice(N - 1 - a, 2 * N - 1 - a) for a in i)]
        g = to_morton(vals * ker, root.n, root.L)
        out[i] = _kernels.choquet_block(g, mask, root.n, W)
    return GridFunction(root, out)


def commutator(b: GridFunction, f: GridFunction, rp: RieszParams) -> GridFunction:
    """[b, I_alpha] f = b I_alpha f - I_alpha(b f)."""
    root = f.root
    rp.check(root)
    bv, fv = _vals(b), _vals(f)
    return GridFunction(root, bv * _riesz_values(root, fv, rp) - _riesz_values(root, bv * fv, rp))


def iterated_commutator(b: GridFunction, f: GridFunction, m: int, rp: RieszParams) -> GridFunction:
    """sum_j C(m, j) (-1)^j b^(m-j) I_alpha(b^j f)."""
    if int(m) != m or m < 1:
        raise RieszError("iterated commutator order must be a positive integer")
    root = f.root
    rp.check(root)
    bv, fv = _vals(b), _vals(f)
    total = np.zeros(root.shape)
    for j in range(m + 1):
        coef = float(comb(m, j, exact=True)) * (-1.0) ** j
        total = total + coef * bv ** (m - j) * _riesz_values(root, bv**j * fv, rp)
    return GridFunction(root, total)


def riesz_at_point(f: GridFunction, x: np.ndarray, alpha: float) -> float:
    """Point evaluation sum_j f_j h^n |x - y_j|^(alpha - n) at a point off the support."""
    root = f.root
    vals = _vals(f)
    idx = np.nonzero(vals)
    if not idx[0].size:
        return 0.0
    centers = root.cell_centers()
    r2 = sum((centers[d][idx[d]] - x[d]) ** 2 for d in range(root.n))
    if np.any(r2 == 0):
        raise RieszError("evaluation point coincides with a support cell center")
    return float(np.sum(vals[idx] * r2 ** ((alpha - root.n) / 2))) * root.h**root.n
