"""Test-function generators.

Each draw is a resolution-free recipe (continuous centers and radii, or
random values on a fixed coarse dyadic level) that is rendered on any root,
so a refinement L -> L+1 sees the same underlying function. Symbols b are
normalized to BMO^beta norm 1 on the grid they are rendered on; inputs f are
supported in the central half [1/4, 3/4)^n of the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bmo import bmo_norm
from ..content import ContentParams, minimal_cover
from ..lattice import Cube, DyadicCube, GridFunction, LeafSet, RootCube
from .config import CheckConfig

B_KINDS = ("bmo-log", "random-step-bmo", "indicator", "constant")
F_KINDS = ("bump", "indicator", "constant", "random-step")
KINDS = ("bmo-log", "random-step-bmo", "bump", "indicator", "constant", "fourier-witness", "random-step")
COARSE = 3
SYMBOL_SIDE = ("bmo-log", "random-step-bmo", "constant")


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class Recipe:
    kind: str
    data: dict = field(default_factory=dict)

    def render(self, root: RootCube) -> GridFunction:
        return GridFunction(root, _RENDER[self.kind](root, self.data))


def _unit_centers(root: RootCube) -> list[np.ndarray]:
    """Cell centers in root units, i.e. in [0, 1)."""
    return np.meshgrid(*[(np.arange(root.per_axis) + 0.5) / root.per_axis] * root.n, indexing="ij")


def _render_bmo_log(root, d):
    x = _unit_centers(root)
    r = np.sqrt(sum((xi - ci) ** 2 for xi, ci in zip(x, d["x0"])))
    # distances are clipped at half a leaf so the singularity stays on the grid
    return np.log(np.maximum(r, 0.5 / root.per_axis))


def _render_coarse(root, d):
    vals = np.asarray(d["values"])
    level = d["level"]
    x = _unit_centers(root)
    idx = tuple(np.minimum((xi * (1 << level)).astype(int), (1 << level) - 1) for xi in x)
    out = vals[idx]
    if d.get("central"):
        out = out * _central_mask(x)
    return out


def _central_mask(x) -> np.ndarray:
    m = np.ones(x[0].shape, bool)
    for xi in x:
        m &= (xi >= 0.25) & (xi < 0.75)
    return m.astype(float)


def _render_bump(root, d):
    x = _unit_centers(root)
    rho2 = sum((xi - ci) ** 2 for xi, ci in zip(x, d["center"])) / d["radius"] ** 2
    out = np.zeros(root.shape)
    inside = rho2 < 1
    out[inside] = d["amp"] * np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
    return out


def _render_box(root, d):
    x = _unit_centers(root)
    m = np.ones(root.shape, bool)
    for xi, lo, hi in zip(x, d["lo"], d["hi"]):
        m &= (xi >= lo) & (xi < hi)
    return d.get("amp", 1.0) * m.astype(float)


def _render_constant(root, d):
    out = np.full(root.shape, float(d["value"]))
    if d.get("central"):
        out *= _central_mask(_unit_centers(root))
    return out


_RENDER = {
    "bmo-log": _render_bmo_log,
    "random-step-bmo": _render_coarse,
    "random-step": _render_coarse,
    "bump": _render_bump,
    "indicator": _render_box,
    "constant": _render_constant,
}


def draw(kind: str, n: int, rng: np.random.Generator, role: str = "f") -> Recipe:
    """A random recipe of the given kind; ``role`` is ``b`` (symbol) or ``f`` (input)."""
    if kind == "bmo-log":
        return Recipe(kind, {"x0": tuple(rng.uniform(0.3, 0.7, n))})
    if kind == "random-step-bmo":
        return Recipe(kind, {"level": COARSE, "values": rng.standard_normal((1 << COARSE,) * n)})
    if kind == "random-step":
        level = COARSE + 1
        vals = rng.uniform(0.0, 1.0, (1 << level,) * n) * (rng.uniform(size=(1 << level,) * n) < 0.6)
        if not vals.any():
            vals.flat[rng.integers(vals.size)] = 1.0
        return Recipe(kind, {"level": level, "values": vals, "central": True})
    if kind == "bump":
        r = rng.uniform(0.05, 0.2)
        c = tuple(rng.uniform(0.25 + r, 0.75 - r, n))
        return Recipe(kind, {"center": c, "radius": r, "amp": rng.uniform(0.5, 2.0)})
    if kind == "indicator":
        if role == "b":
            # a half-space-like jump through the middle of the root
            cut = rng.uniform(0.3, 0.7)
            lo = (0.0,) * n
            hi = (cut,) + (1.0,) * (n - 1)
            return Recipe(kind, {"lo": lo, "hi": hi})
        w = rng.uniform(1 / 16, 1 / 4)
        lo = tuple(rng.uniform(0.25, 0.75 - w, n))
        return Recipe(kind, {"lo": lo, "hi": tuple(a + w for a in lo)})
    if kind == "constant":
        return Recipe(kind, {"value": 1.0, "central": role == "f"})
    if kind == "fourier-witness":
        raise GeneratorError("fourier-witness inputs depend on a target cube; use fourier_witness()")
    raise GeneratorError(f"unknown generator kind {kind!r}")


def normalize_bmo(b: GridFunction, params: ContentParams) -> tuple[GridFunction, float]:
    """Scale b to BMO^beta norm 1 (constants are returned unchanged) and return the old norm."""
    nb = bmo_norm(b, params)
    if nb == 0:
        return b, 0.0
    return GridFunction(b.root, b.values / nb), nb


def render_symbol(recipe: Recipe, root: RootCube, params: ContentParams) -> GridFunction:
    b = recipe.render(root)
    if recipe.kind == "constant":
        return b
    return normalize_bmo(b, params)[0]


def sample_pair(cfg: CheckConfig, idx: int) -> tuple[Recipe, Recipe]:
    """The (b, f) recipes of sample ``idx``: kinds cycle over b_kinds x f_kinds."""
    combos = [(bk, fk) for bk in cfg.b_kinds for fk in cfg.f_kinds]
    if not combos:
        raise GeneratorError("need at least one b kind and one f kind")
    bk, fk = combos[idx % len(combos)]
    rng = cfg.rng(idx, "pair")
    return draw(bk, cfg.n, rng, "b"), draw(fk, cfg.n, rng, "f")


def gen_functions(kind: str, cfg: CheckConfig, seed: int | None = None, root: RootCube | None = None,
                  target: DyadicCube | None = None) -> list[tuple[GridFunction, GridFunction]]:
    """``cfg.samples`` (b, f) pairs where ``kind`` fixes one side.

    A symbol kind pairs with inputs drawn from ``cfg.f_kinds``; an input kind
    pairs with symbols from ``cfg.b_kinds``. ``fourier-witness`` returns the
    real and imaginary parts of every witness input for ``target`` (default:
    the level-2 cube at the origin) with a random-step-bmo symbol.
    """
    from ..lattice import build_root

    if kind not in KINDS:
        raise GeneratorError(f"unknown generator kind {kind!r}")
    seed = cfg.seed if seed is None else seed
    if seed < 0:
        raise GeneratorError("seed must be nonnegative")
    cfg = cfg.with_(seed=seed)
    root = root or build_root(cfg.n, cfg.L)
    params = ContentParams(cfg.beta)
    out = []
    if kind == "fourier-witness":
        b = render_symbol(draw("random-step-bmo", cfg.n, cfg.rng(0, "fw"), "b"), root, params)
        Q = target or DyadicCube(2, (0,) * cfg.n)
        fw = fourier_witness(b, Q.box(root))
        for _, re, im in fw.tests:
            out += [(b, re), (b, im)]
        return out
    for i in range(cfg.samples):
        rng = cfg.rng(i, "gen")
        if kind in SYMBOL_SIDE:
            b_r, f_r = draw(kind, cfg.n, rng, "b"), draw(cfg.f_kinds[i % len(cfg.f_kinds)], cfg.n, rng, "f")
        else:
            b_r, f_r = draw(cfg.b_kinds[i % len(cfg.b_kinds)], cfg.n, rng, "b"), draw(kind, cfg.n, rng, "f")
        out.append((render_symbol(b_r, root, params), f_r.render(root)))
    return out


# --- the Fourier witness ------------------------------------------------------------

@dataclass
class FourierWitness:
    """Geometry and inputs of the lower-bound argument for a cube Q.

    P has side 4 side(Q) and shares Q's lower-left corner, P_R is its upper
    right half (side 2 side(Q)), c_Q is the Lebesgue mean of b on P_R and
    sigma = sgn(b - c_Q). ``tests`` holds (k, Re f_k, Im f_k) for
    f_k(y) = exp(-i k.y / (2 sqrt(n) side(P))) on P_R.
    """

    Q: Cube
    P: Cube
    PR: Cube
    c_Q: float
    sigma: GridFunction
    tests: list


def fourier_witness(b: GridFunction, Q, kmax: int = 2) -> FourierWitness:
    root = b.root
    Q = Q.box(root) if isinstance(Q, DyadicCube) else Q
    P = Cube(Q.lo, 4 * Q.size)
    if not P.inside(root):
        raise GeneratorError("the witness cube P = 4Q (same corner) leaves the root")
    PR = Cube(tuple(a + 2 * Q.size for a in Q.lo), 2 * Q.size)
    c_Q = float(np.mean(b.values[PR.slices()]))
    sigma = GridFunction(root, np.sign(b.values - c_Q))
    chi = np.zeros(root.shape)
    chi[PR.slices()] = 1.0
    scale = 2 * math.sqrt(root.n) * P.size * root.h
    y = root.mesh()
    tests = []
    for k in np.ndindex(*([2 * kmax + 1] * root.n)):
        kk = tuple(int(a) - kmax for a in k)
        phase = sum(ki * yi for ki, yi in zip(kk, y)) / scale
        tests.append((kk, GridFunction(root, np.cos(phase) * chi), GridFunction(root, -np.sin(phase) * chi)))
    return FourierWitness(Q, P, PR, c_Q, sigma, tests)


def witness_cubes(root: RootCube, min_level: int = 2, max_level: int = 4) -> list[Cube]:
    """Dyadic cubes Q whose witness cube P = 4Q (same corner) fits in the root."""
    out = []
    for k in range(min_level, min(max_level, root.L) + 1):
        size = 1 << (root.L - k)
        for c in np.ndindex(*([1 << k] * root.n)):
            Q = Cube(tuple(int(a) * size for a in c), size)
            if Cube(Q.lo, 4 * size).inside(root):
                out.append(Q)
    return out


# --- cube families for the packing checks -------------------------------------------

def random_disjoint_family(root: RootCube, rng: np.random.Generator, max_level: int = 6,
                           p_take: float = 0.3, p_empty: float = 0.25) -> list[DyadicCube]:
    """Non-overlapping dyadic cubes from a random splitting of the root."""
    max_level = min(max_level, root.L)
    out = []
    stack = [DyadicCube(0, (0,) * root.n)]
    while stack:
        q = stack.pop()
        u = rng.uniform()
        if q.level > 0 and (u < p_take or q.level == max_level):
            out.append(q)
        elif q.level > 0 and u < p_take + p_empty:
            continue
        else:
            stack.extend(reversed(q.children()))
    if not out:
        out.append(DyadicCube(1, (0,) * root.n))
    return sorted(out, key=lambda c: (c.level, c.coords))


def packing_constant(cubes: list[DyadicCube], root: RootCube, beta: float) -> float:
    """max over dyadic Q of sum_{Q_k inside Q} side(Q_k)^beta / side(Q)^beta."""
    acc: dict[DyadicCube, float] = {}
    for c in set(cubes):
        w = c.side(root) ** beta
        q = c
        while True:
            acc[q] = acc.get(q, 0.0) + w
            if q.level == 0:
                break
            q = q.parent()
    return max((v / q.side(root) ** beta for q, v in acc.items()), default=0.0)


def random_packing_family(root: RootCube, rng: np.random.Generator, beta: float, tries: int = 40,
                          max_level: int = 5) -> list[DyadicCube]:
    """Greedily accept random dyadic cubes while the packing constant stays <= 2."""
    max_level = min(max_level, root.L)
    fam: list[DyadicCube] = []
    for _ in range(tries):
        k = int(rng.integers(1, max_level + 1))
        c = DyadicCube(k, tuple(int(x) for x in rng.integers(0, 1 << k, root.n)))
        if c in fam:
            continue
        if packing_constant(fam + [c], root, beta) <= 2.0:
            fam.append(c)
    return fam


@dataclass
class PackingSelection:
    family: list[DyadicCube]
    selected: list[DyadicCube]
    ancestors: list[DyadicCube]


def packing_subfamily(root: RootCube, family: list[DyadicCube], params: ContentParams) -> PackingSelection:
    """Greedy ancestor merging for a non-overlapping family.

    The ancestors are the non-original cubes of a minimal cover of the
    union. Inside each ancestor A, original cubes are taken largest first
    whenever no dyadic cube between the candidate and A would exceed twice
    its own weight, until the taken weight reaches side(A)^beta. Original
    cubes of the minimal cover are kept as they are.
    """
    beta = params.beta
    originals = set(family)
    E = LeafSet.from_cubes(root, [c.box(root) for c in family])
    cover = minimal_cover(E, params).cubes
    selected: list[DyadicCube] = []
    ancestors: list[DyadicCube] = []
    for A in cover:
        if A in originals:
            selected.append(A)
            continue
        ancestors.append(A)
        inside = [c for c in family if _is_ancestor(A, c)]
        inside.sort(key=lambda c: (c.level, c.coords))
        goal = A.side(root) ** beta
        load: dict[DyadicCube, float] = {}
        taken = 0.0
        for c in inside:
            if taken >= goal:
                break
            w = c.side(root) ** beta
            chain = []
            q = c.parent()
            while True:
                chain.append(q)
                if q == A:
                    break
                q = q.parent()
            if all(load.get(q, 0.0) + w <= 2 * q.side(root) ** beta for q in chain):
                for q in chain:
                    load[q] = load.get(q, 0.0) + w
                selected.append(c)
                taken += w
    return PackingSelection(list(family), selected, ancestors)


def _is_ancestor(A: DyadicCube, c: DyadicCube) -> bool:
    if c.level <= A.level:
        return False
    shift = c.level - A.level
    return all((x >> shift) == y for x, y in zip(c.coords, A.coords))
