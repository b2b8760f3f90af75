"""The registry of inequality checks.

A check maps ``(cfg, root)`` to a list of ``LevelClaim``: per-sample ratios
LHS/RHS of one inequality on one grid. The harness runs a check on every
refinement level of the config and merges claims by name. Ratios use
0/0 = 0 and x/0 = inf, so identities on trivial inputs give 0 (or exactly 1).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from .. import _kernels
from ..bmo import bmo_norm, family_oscillations, oscillation, shifted_mean_gap, truncate
from ..choquet import choquet_integral, content_average, family_profiles, lp_quasinorm, profile
from ..content import ContentParams, dyadic_content, level_weights
from ..lattice import (Cube, DyadicCube, GridFunction, LeafSet, RootCube, build_root, centered_dilation,
                       dilate, to_morton)
from ..operators import (RieszParams, beta_riesz_potential, commutator, maximal_content, maximal_fractional,
                         maximal_orlicz_fractional, maximal_sharp, riesz_at_point, riesz_potential)
from ..operators.riesz import self_cell_constant
from ..young import EndpointFns, YoungSpec, luxemburg_mean, parse_young
from .config import CheckConfig, ConfigError
from .generators import (Recipe, draw, fourier_witness, packing_constant, packing_subfamily, random_disjoint_family,
                         random_packing_family, render_symbol, _is_ancestor, sample_pair, witness_cubes)
from .report import ratio


@dataclass
class LevelClaim:
    name: str
    kind: str
    statement: str
    ratios: list[float]
    bound: float | None = None
    value: float | None = None
    rtol: float = 0.0
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    fn: Callable[[CheckConfig, RootCube], list[LevelClaim]]
    summary: str
    desk: dict
    validate: Callable[[CheckConfig], None] | None = None


CHECKS: dict[str, CheckSpec] = {}


def register(check_id: str, summary: str, desk: dict, validate=None):
    def deco(fn):
        CHECKS[check_id] = CheckSpec(check_id, fn, summary, desk, validate)
        return fn
    return deco


def get_check(check_id: str) -> CheckSpec:
    try:
        return CHECKS[check_id]
    except KeyError:
        raise ConfigError(f"unknown check id {check_id!r}; known: {', '.join(sorted(CHECKS))}") from None


def desk_config(check_id: str, seed: int = 0, **overrides) -> CheckConfig:
    spec = get_check(check_id)
    kw = dict(spec.desk)
    kw.update(overrides)
    return CheckConfig(check_id=check_id, seed=seed, **kw)


# --- shared helpers ------------------------------------------------------------------

def _params(cfg: CheckConfig) -> ContentParams:
    return ContentParams(cfg.beta)


def _sup_ratio(lhs, rhs) -> float:
    """max over points of lhs/rhs with 0/0 = 0 and x/0 = inf."""
    lhs = np.abs(np.asarray(lhs, float)).ravel()
    rhs = np.asarray(rhs, float).ravel()
    pos = rhs > 0
    if np.any(lhs[~pos] > 0):
        return math.inf
    if not pos.any():
        return 0.0
    return float(np.max(lhs[pos] / rhs[pos]))


def _unit_centers(root: RootCube):
    return np.meshgrid(*[(np.arange(root.per_axis) + 0.5) / root.per_axis] * root.n, indexing="ij")


def _box_set(root: RootCube, boxes) -> LeafSet:
    """Union of boxes given in root units (cells selected by their centers)."""
    x = _unit_centers(root)
    m = np.zeros(root.shape, bool)
    for lo, hi in boxes:
        cur = np.ones(root.shape, bool)
        for xi, a, b in zip(x, lo, hi):
            cur &= (xi >= a) & (xi < b)
        m |= cur
    return LeafSet(root, m)


def _random_boxes(rng, n, count, lo=0.0, hi=1.0, wmin=1 / 16, wmax=1 / 2):
    out = []
    for _ in range(count):
        w = rng.uniform(wmin, min(wmax, hi - lo), n)
        a = np.array([rng.uniform(lo, hi - wi) for wi in w])
        out.append((tuple(a), tuple(a + w)))
    return out


def _random_dyadic(rng, root: RootCube, kmin: int, kmax: int) -> DyadicCube:
    k = int(rng.integers(kmin, min(kmax, root.L) + 1))
    return DyadicCube(k, tuple(int(c) for c in rng.integers(0, 1 << k, root.n)))


def _input_recipe(kind: str, n: int, rng, central: bool = True) -> Recipe:
    r = draw(kind, n, rng, "f")
    if not central and kind == "random-step":
        r = Recipe(kind, {**r.data, "central": False})
    return r


def _stable(name, statement, ratios, **kw) -> LevelClaim:
    return LevelClaim(name, "stable", statement, ratios, **kw)


def _symbol_pairs(cfg: CheckConfig, root: RootCube, params: ContentParams):
    """(index, b, ||b||, f) over cfg.samples, b normalized on this grid."""
    for i in range(cfg.samples):
        b_r, f_r = sample_pair(cfg, i)
        b = render_symbol(b_r, root, params)
        yield i, b, bmo_norm(b, params, cfg.family, budget=cfg.budget), f_r.render(root)


def _inputs(cfg: CheckConfig, root: RootCube, stream: str = "f"):
    for i in range(cfg.samples):
        kind = cfg.f_kinds[i % len(cfg.f_kinds)]
        yield i, _input_recipe(kind, cfg.n, cfg.rng(i, stream)).render(root)


def _symbols(cfg: CheckConfig, root: RootCube, params: ContentParams, stream: str = "b"):
    for i in range(cfg.samples):
        kind = cfg.b_kinds[i % len(cfg.b_kinds)]
        b = render_symbol(draw(kind, cfg.n, cfg.rng(i, stream), "b"), root, params)
        yield i, b


def _modular_curve(prof, ts: np.ndarray, B: YoungSpec, scale: float = 1.0, block: int = 256) -> np.ndarray:
    """t -> int B(scale |f| / t) dH for every t in ``ts`` from the layer profile of f."""
    ts = np.asarray(ts, float)
    out = np.zeros(ts.size)
    if prof.t.size == 0:
        return out
    a = scale * prof.t
    for s in range(0, ts.size, block):
        tt = ts[s:s + block]
        with np.errstate(over="ignore"):
            vals = B(a[None, :] / tt[:, None])
        d = np.diff(vals, axis=1, prepend=0.0)
        out[s:s + block] = np.sum(d * prof.H[None, :], axis=1)
    return out


def _riesz(cfg: CheckConfig) -> RieszParams:
    return RieszParams(cfg.alpha)


def _fractional_maximal_orlicz(f, cfg, params, B):
    return maximal_orlicz_fractional(f, cfg.alpha, B, params, cfg.family, budget=cfg.budget)


# --- validators ----------------------------------------------------------------------

def _need_alpha(cfg: CheckConfig) -> None:
    cfg.require_alpha()


def _need_riesz(cfg: CheckConfig) -> None:
    cfg.require_alpha()
    if not cfg.alpha < cfg.n:
        raise ConfigError(f"Riesz potentials need alpha < n, got alpha={cfg.alpha}")


def _need_pair(cfg: CheckConfig) -> None:
    _need_riesz(cfg)
    cfg.exponents()


def _need_endpoint(cfg: CheckConfig) -> None:
    _need_riesz(cfg)
    cfg.require_endpoint()


# === choquet ===========================================================================

def _axiom_functions(cfg, root, i, stream):
    rng = cfg.rng(i, stream)
    kinds = ("random-step", "bump", "indicator")
    return [_input_recipe(kinds[(i + j) % 3], cfg.n, rng, central=False).render(root) for j in range(3)]


def _homogeneity_claim(cfg, root, params) -> LevelClaim:
    ratios = []
    for i in range(cfg.samples):
        f = _axiom_functions(cfg, root, i, "axioms")[0]
        a = 2.0 ** int(cfg.rng(i, "scale").integers(-6, 7))
        ratios.append(ratio(choquet_integral(GridFunction(root, a * f.values), params),
                            a * choquet_integral(f, params)))
    return LevelClaim("homogeneity", "exact", "int a f dH = a int f dH (a a power of two)", ratios, value=1.0)


@register("choquet_axioms", "Choquet calculus: homogeneity, quasi-subadditivity, Hoelder, strong "
          "subadditivity, the average bound",
          dict(n=1, L=6, beta=0.7, samples=500))
def check_choquet_axioms(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    sub, hold, sub3, sets, avg = [], [], [], [], []
    for i in range(cfg.samples):
        f1, f2, f3 = _axiom_functions(cfg, root, i, "axioms")
        I1, I2, I3 = (choquet_integral(g, params) for g in (f1, f2, f3))
        sub.append(ratio(choquet_integral(f1 + f2, params), I1 + I2))
        sub3.append(ratio(choquet_integral(GridFunction(root, f1.values + f2.values + f3.values), params),
                          I1 + I2 + I3))
        rng = cfg.rng(i, "holder")
        p = rng.uniform(1.2, 4.0)
        pp = p / (p - 1)
        hold.append(ratio(choquet_integral(f1 * f2, params),
                          lp_quasinorm(f1, p, params) * lp_quasinorm(f2, pp, params)))
        A = _box_set(root, _random_boxes(rng, cfg.n, int(rng.integers(1, 4))))
        Bset = _box_set(root, _random_boxes(rng, cfg.n, int(rng.integers(1, 4))))
        H = lambda E: dyadic_content(E, params)
        sets.append(ratio(H(A | Bset) + H(A & Bset), H(A) + H(Bset)))
        Q = _random_dyadic(rng, root, 0, 3)
        c = rng.uniform(0.0, float(f1.values.max()))
        fq = content_average(f1, Q, params)
        avg.append(ratio(abs(fq - c), content_average(GridFunction(root, f1.values - c), Q, params)))
    return [
        _homogeneity_claim(cfg, root, params),
        LevelClaim("subadditivity", "bound", "int (f1 + f2) <= 2 (int f1 + int f2)", sub, bound=2.0),
        LevelClaim("holder", "bound", "int f1 f2 <= 2 ||f1||_p ||f2||_p'", hold, bound=2.0),
        LevelClaim("strong_subadditivity", "bound", "H(A u B) + H(A n B) <= H(A) + H(B)", sets, bound=1.0,
                   rtol=1e-12),
        LevelClaim("subadditivity_dyadic", "bound", "int (f1 + f2 + f3) <= sum int fj (dyadic content)", sub3,
                   bound=1.0, rtol=1e-12),
        LevelClaim("average_bound", "bound", "|f_Q - c| <= H(Q)^-1 int_Q |f - c|", avg, bound=1.0, rtol=1e-12),
    ]


@register("choquet_homogeneity", "Choquet homogeneity alone (an identity: C_emp = 1)",
          dict(n=1, L=6, beta=0.7, samples=100))
def check_choquet_homogeneity(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    return [_homogeneity_claim(cfg, root, _params(cfg))]


@register("content_equivalence", "dyadic contents of translates: the lattice-dependence ratio",
          dict(n=2, L=6, beta=1.3, samples=40))
def check_content_equivalence(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    if root.L < 5:
        raise ConfigError("content_equivalence shifts by 1/32 and needs L >= 5")
    params = _params(cfg)
    ratios = []
    for i in range(cfg.samples):
        rng = cfg.rng(i, "sets")
        boxes = _random_boxes(rng, cfg.n, int(rng.integers(1, 4)), 0.25, 0.75, 1 / 32, 1 / 4)
        shifts = [np.zeros(cfg.n)] + [rng.integers(-8, 8, cfg.n) / 32 for _ in range(8)]
        vals = []
        for d in shifts:
            moved = [(tuple(np.add(lo, d)), tuple(np.add(hi, d))) for lo, hi in boxes]
            vals.append(dyadic_content(_box_set(root, moved), params))
        ratios.append(ratio(max(vals), min(vals)))
    return [_stable("translation_ratio", "max_d H(E + d) / min_d H(E + d) over lattice translates", ratios)]


@register("packing", "packing inequality and the ancestor-merging subfamily conclusions",
          dict(n=2, L=5, beta=1.5, samples=50))
def check_packing(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    beta = cfg.beta
    eq, cover, pack, h_s1, s1_s2, s2_h = [], [], [], [], [], []
    for i in range(cfg.samples):
        rng = cfg.rng(i, "packing")
        fam = random_packing_family(root, rng, beta, max_level=min(5, root.L))
        f = _input_recipe("random-step", cfg.n, rng, central=False).render(root)
        union = LeafSet.from_cubes(root, [c.box(root) for c in fam])
        lhs = math.fsum(choquet_integral(f, params, c.box(root)) for c in fam)
        eq.append(ratio(lhs, choquet_integral(f, params, union) if fam else 0.0))

        disjoint = random_disjoint_family(root, rng, max_level=min(5, root.L))
        sel = packing_subfamily(root, disjoint, params)
        E = LeafSet.from_cubes(root, [c.box(root) for c in disjoint])
        C = LeafSet.from_cubes(root, [c.box(root) for c in sel.selected + sel.ancestors])
        cover.append(ratio((E & C).count(), E.count()))
        pack.append(packing_constant(sel.selected, root, beta))
        HE = dyadic_content(E, params)
        w = lambda c: c.side(root) ** beta
        free = [c for c in sel.selected if not any(_is_ancestor(A, c) for A in sel.ancestors)]
        S1 = math.fsum(map(w, free)) + math.fsum(map(w, sel.ancestors))
        S2 = math.fsum(map(w, sel.selected))
        h_s1.append(ratio(HE, S1))
        s1_s2.append(ratio(S1, S2))
        s2_h.append(ratio(S2, HE))
    return [
        LevelClaim("packing_inequality", "bound", "sum_k int_{Q_k} f <= 2 int_{u Q_k} f", eq, bound=2.0,
                   rtol=1e-12),
        LevelClaim("subfamily_cover", "exact", "u Q_j is covered by the subfamily and the ancestors", cover,
                   value=1.0),
        LevelClaim("subfamily_packing", "bound", "the subfamily satisfies the packing condition", pack, bound=2.0,
                   rtol=1e-12),
        LevelClaim("content_vs_S1", "bound", "H(u Q_j) <= free subfamily weight + ancestor weight", h_s1,
                   bound=1.0, rtol=1e-12),
        LevelClaim("S1_vs_S2", "bound", "free + ancestor weight <= subfamily weight", s1_s2, bound=1.0, rtol=1e-12),
        LevelClaim("S2_vs_content", "bound", "subfamily weight <= 2 H(u Q_j)", s2_h, bound=2.0, rtol=1e-12),
    ]


@register("dimension_change", "int f dH^beta <= (beta/alpha) (int f^(alpha/beta) dH^alpha)^(beta/alpha)",
          dict(n=2, L=4, alpha=0.7, beta=1.4, samples=200, f_kinds=("random-step", "bump", "indicator")))
def check_dimension_change(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    if not 0 < cfg.alpha <= cfg.beta:
        raise ConfigError("dimension change needs 0 < alpha <= beta")
    pb, pa = ContentParams(cfg.beta), ContentParams(cfg.alpha)
    r = cfg.alpha / cfg.beta
    ratios = []
    for i in range(cfg.samples):
        kind = cfg.f_kinds[i % len(cfg.f_kinds)]
        f = _input_recipe(kind, cfg.n, cfg.rng(i, "f"), central=False).render(root)
        lhs = choquet_integral(f, pb)
        rhs = (cfg.beta / cfg.alpha) * profile(f, pa).integral(lambda t: t**r) ** (1 / r)
        ratios.append(ratio(lhs, rhs))
    return [LevelClaim("dimension_change", "bound", "int f dH^beta / ((beta/alpha)(int f^(a/b) dH^alpha)^(b/a))",
                       ratios, bound=1.0, rtol=1e-12)]


# === maximal functions and BMO ============================================================

@register("fefferman_stein", "||M f||_p <= C ||M# f||_p",
          dict(n=1, L=8, beta=0.8, p=2.0, samples=20, f_kinds=("bump", "indicator", "random-step")))
def check_fefferman_stein(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    ratios = []
    for _, f in _inputs(cfg, root):
        Mf = maximal_content(f, params, cfg.family, budget=cfg.budget)
        Ms = maximal_sharp(f, params, cfg.family, budget=cfg.budget)
        ratios.append(ratio(lp_quasinorm(Mf, cfg.p, params), lp_quasinorm(Ms, cfg.p, params)))
    return [_stable("fefferman_stein", "||M f||_p / ||M# f||_p", ratios)]


def _phi_weighted_sup(g: GridFunction, params, phi) -> float:
    """sup_lambda phi(lambda) H({g > lambda}) for increasing phi, attained as lambda -> t_j from below."""
    prof = profile(g, params)
    if prof.t.size == 0:
        return 0.0
    return float(np.max(phi(prof.t) * prof.H))


@register("modular_fs", "sup phi(l) H({M^D f > l}) <= C sup phi(l) H({M# f > l}), phi(l) = 1/Psi(B(1/l))",
          dict(n=1, L=8, alpha=0.5, beta=0.75, samples=20, f_kinds=("bump", "indicator", "random-step")),
          _need_alpha)
def check_modular_fs(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    B = parse_young(cfg.young)
    E = EndpointFns(cfg.alpha, cfg.beta, B)

    def phi(lam):
        with np.errstate(divide="ignore", over="ignore"):
            return 1.0 / E.psi(B(1.0 / lam))

    ratios = []
    for _, f in _inputs(cfg, root):
        MD = maximal_content(f, params, "dyadic", denominator="power")
        Ms = maximal_sharp(f, params, cfg.family, budget=cfg.budget)
        ratios.append(ratio(_phi_weighted_sup(MD, params, phi), _phi_weighted_sup(Ms, params, phi)))
    return [_stable("modular_fs", "sup phi H({M^D f > l}) / sup phi H({M# f > l})", ratios)]


@register("bmo_shift", "|b_{2^k Q} - b_Q| <= C k ||b||",
          dict(n=1, L=8, beta=0.6, samples=20))
def check_bmo_shift(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    ratios = []
    for i, b in _symbols(cfg, root, params):
        nb = bmo_norm(b, params, cfg.family, budget=cfg.budget)
        rng = cfg.rng(i, "cubes")
        best = 0.0
        for _ in range(4):
            Q = _random_dyadic(rng, root, 1, 6)
            for k in range(1, Q.level + 1):
                best = max(best, ratio(shifted_mean_gap(b, Q, k, params), k * nb))
        ratios.append(best)
    return [_stable("shift_gap", "|b_{2^k Q} - b_Q| / (k ||b||)", ratios)]


C1_GRID = tuple(2.0**j for j in range(-2, 7))
C2 = 4.0


def exp_averages(b: GridFunction, params: ContentParams, C1: float, nb: float) -> float:
    """sup over dyadic Q of side(Q)^-beta int_Q exp(|b - b_Q| / (C1 ||b||)) dH."""
    root = b.root
    osc = family_oscillations(b, params, "dyadic")
    vals = to_morton(b.values, root.n, root.L)
    W = level_weights(root, params)
    best = 0.0
    for level, _, _, cstar, _ in osc.groups:
        size = 1 << (root.n * (root.L - level))
        shifted = np.abs(vals - np.repeat(cstar, size))
        T, H, _ = _kernels.level_profiles(np.ascontiguousarray(shifted), root.n, root.L, level, W)
        with np.errstate(over="ignore"):
            phi = np.expm1(T / (C1 * nb))
        dphi = np.diff(phi, axis=1, prepend=0.0)
        # exp(g) = 1 + (exp(g) - 1) and H(Q) = side^beta for dyadic Q
        avg = 1.0 + np.sum(dphi * H, axis=1) / W[level]
        best = max(best, float(np.max(avg)))
    return best


@register("exp_bmo", "exponential integrability: minimal C1 on a grid with sup_Q mean of exp <= C2 = 4",
          dict(n=1, L=8, beta=0.6, samples=20, b_kinds=("bmo-log", "indicator")))
def check_exp_bmo(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    ratios = []
    worst = []
    for _, b in _symbols(cfg, root, params):
        nb = bmo_norm(b, params)
        if nb == 0:
            ratios.append(0.0)
            continue
        found = math.inf
        for C1 in C1_GRID:
            if exp_averages(b, params, C1, nb) <= C2:
                found = C1
                break
        ratios.append(found)
        worst.append(exp_averages(b, params, C1_GRID[-1], nb))
    return [_stable("min_C1", "smallest grid C1 with sup_Q side^-beta int_Q exp(|b - b_Q|/(C1||b||)) <= 4",
                    ratios, extras={"C1_grid": list(C1_GRID), "C2": C2, "avg_at_largest_C1": worst})]


JN_P = (1.0, 2.0, 4.0, 8.0)


@register("jn_p", "p-oscillation <= C p ||b|| for p in {1, 2, 4, 8}",
          dict(n=1, L=8, beta=0.6, samples=20, b_kinds=("bmo-log", "indicator")))
def check_jn_p(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    per_p = {p: [] for p in JN_P}
    interior = []
    for _, b in _symbols(cfg, root, params):
        fo = family_oscillations(b, params)
        nb = fo.max()
        interior.append(fo.interior_count())
        for p in JN_P:
            per_p[p].append(ratio(bmo_norm(b, params, p=p), p * nb))
    worst = [max(r) for r in zip(*per_p.values())]
    # p = 1 is the norm itself (ratio 1); the per-p claims show the larger exponents
    # interior_cubes: cubes whose best constant is not a data value (non-convex oscillation in c)
    return [_stable("jn_p", "max_p sup_Q p-oscillation / (p ||b||), p in {1, 2, 4, 8}", worst,
                    extras={"interior_cubes": interior})] + [
        LevelClaim(f"jn_p{p:g}", "diagnostic", f"sup_Q {p:g}-oscillation / ({p:g} ||b||)", r)
        for p, r in per_p.items() if p > 1]


@register("bmo_lattice", "BMO lattice calculus and truncation",
          dict(n=1, L=8, beta=0.6, samples=20, b_kinds=("bmo-log", "random-step-bmo", "indicator")))
def check_bmo_lattice(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    norm = lambda g: bmo_norm(g, params, cfg.family, budget=cfg.budget)
    out = {k: [] for k in ("sum", "homogeneity", "reflection", "abs", "max", "min", "truncation")}
    gs = dict(_symbols(cfg, root, params, "g"))
    for i, f in _symbols(cfg, root, params, "f"):
        g = gs[i]
        nf, ng = norm(f), norm(g)
        out["sum"].append(ratio(norm(f + g), nf + ng))
        j = int(cfg.rng(i, "lambda").integers(-4, 5))
        lam = 2.0**j
        out["homogeneity"].append(ratio(norm(GridFunction(root, lam * f.values)), lam * nf))
        out["reflection"].append(ratio(norm(GridFunction(root, -lam * f.values)), lam * nf))
        out["abs"].append(ratio(norm(abs(f)), nf))
        out["max"].append(ratio(norm(GridFunction(root, np.maximum(f.values, g.values))), nf + ng))
        out["min"].append(ratio(norm(GridFunction(root, np.minimum(f.values, g.values))), nf + ng))
        qs = np.quantile(np.abs(f.values), [0.25, 0.5, 0.75, 0.9])
        out["truncation"].append(max((ratio(norm(truncate(f, k)), nf) for k in qs if k > 0), default=0.0))
    return [
        LevelClaim("sum", "bound", "||f + g|| <= 2 (||f|| + ||g||)", out["sum"], bound=2.0, rtol=1e-9),
        LevelClaim("homogeneity", "exact", "||l f|| = l ||f|| (l a power of two)", out["homogeneity"], value=1.0),
        LevelClaim("reflection", "exact", "||-l f|| = l ||f||", out["reflection"], value=1.0, rtol=1e-12),
        _stable("abs", "|| |f| || / ||f||", out["abs"]),
        _stable("max", "||max(f, g)|| / (||f|| + ||g||)", out["max"]),
        _stable("min", "||min(f, g)|| / (||f|| + ||g||)", out["min"]),
        _stable("truncation", "||b_k|| / ||b|| over quantile levels k", out["truncation"]),
    ]


# === Orlicz ================================================================================

def _random_cubes_inside(rng, root: RootCube, count: int, kmin=0, kmax=3):
    return [_random_dyadic(rng, root, kmin, kmax) for _ in range(count)]


@register("orlicz_holder", "side^-beta int_Q |f g| <= 4 ||f||_{B,Q} ||g||_{Bbar,Q}",
          dict(n=1, L=7, beta=0.8, samples=10, f_kinds=("bump", "indicator", "random-step")))
def check_orlicz_holder(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    B = parse_young(cfg.young)
    Bbar = B.complementary()
    ratios = []
    for i in range(cfg.samples):
        rng = cfg.rng(i, "fg")
        f = _input_recipe(cfg.f_kinds[i % len(cfg.f_kinds)], cfg.n, rng, central=False).render(root)
        g = _input_recipe(cfg.f_kinds[(i + 1) % len(cfg.f_kinds)], cfg.n, rng, central=False).render(root)
        best = 0.0
        for Q in _random_cubes_inside(rng, root, 2):
            lhs = content_average(f * g, Q, params, denominator="power")
            rhs = luxemburg_mean(f, Q, B, params) * luxemburg_mean(g, Q, Bbar, params)
            best = max(best, ratio(lhs, rhs))
        ratios.append(best)
    t = np.logspace(-3, 1.3, 200)
    conj = float(np.max(Bbar(t) / np.expm1(t)))
    return [LevelClaim("orlicz_holder", "bound", "side^-beta int_Q |fg| / (||f||_B,Q ||g||_Bbar,Q)", ratios,
                       bound=4.0, rtol=1e-9),
            LevelClaim("conjugate_vs_exp", "diagnostic", "max over t in [1e-3, 20] of Bbar(t) / (e^t - 1)",
                       [conj])]


def _random_box(rng, root: RootCube) -> Cube:
    N = root.per_axis
    size = int(rng.integers(2, max(3, N // 2 + 1)))
    lo = tuple(int(x) for x in rng.integers(0, N - size + 1, root.n))
    return Cube(lo, size)


def _box_in_root_units(rng, n) -> tuple[tuple[float, ...], float]:
    w = rng.uniform(0.05, 0.5)
    return tuple(rng.uniform(0, 1 - w, n)), w


def _grid_box(root: RootCube, lo_unit, w_unit) -> Cube:
    N = root.per_axis
    size = max(1, int(round(w_unit * N)))
    lo = tuple(min(int(round(a * N)), N - size) for a in lo_unit)
    return Cube(lo, size)


def _covering_dyadic(Q: Cube, root: RootCube) -> list[Cube]:
    """Dyadic cubes of side 2^k (2^(k-1) < side(Q) <= 2^k, in leaves) meeting Q."""
    k = max(0, (Q.size - 1).bit_length())
    s = 1 << k
    ranges = [range(a // s, (a + Q.size - 1) // s + 1) for a in Q.lo]
    return [Cube(tuple(c * s for c in idx), s) for idx in itertools.product(*ranges)]


@register("orlicz_dyadic_localization", "a cube's Orlicz average is controlled by a nearby dyadic cube; "
          "level sets of the Orlicz maximal function versus its dyadic version",
          dict(n=1, L=6, alpha=0.25, beta=0.8, samples=20, f_kinds=("bump", "indicator", "random-step"),
               family="grid-aligned-all"),
          _need_alpha)
def check_orlicz_dyadic_localization(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    B = parse_young(cfg.young)
    a, beta, n = cfg.alpha, cfg.beta, cfg.n
    c = 2.0 ** -(n + beta)
    lemma, cor = [], []
    for i, f in _inputs(cfg, root):
        rng = cfg.rng(i, "cubes")
        best = 0.0
        for _ in range(3):
            Q = _grid_box(root, *_box_in_root_units(rng, n))
            tQ = Q.side(root) ** a * luxemburg_mean(f, Q, B, params)
            ps = [P for P in _covering_dyadic(Q, root) if P.inside(root)]
            tP = max(P.side(root) ** a * luxemburg_mean(f, P, B, params) for P in ps)
            best = max(best, ratio(tQ, tP))
        lemma.append(best)
        M = maximal_orlicz_fractional(f, a, B, params, cfg.family, budget=cfg.budget, on_budget="subsample",
                                      seed=cfg.seed)
        MD = maximal_orlicz_fractional(f, a, B, params, "dyadic")
        pM, pD = profile(M, params), profile(MD, params)
        cor.append(_level_set_ratio(pM, pD, c))
    return [
        LevelClaim("localization", "bound", "side(Q)^a ||f||_B,Q / max_P side(P)^a ||f||_B,P <= 2^(n+beta)",
                   lemma, bound=2.0 ** (n + beta), rtol=1e-9),
        _stable("level_sets", "sup_t H({M f > t}) / H({M^D f > c t}), c = 2^-(n+beta)", cor,
                extras={"reference_constant": 3.0**n, "c": c}),
    ]


def _level_set_ratio(pM, pD, c: float) -> float:
    """sup over t > 0 of H({M > t}) / H({D > c t}), both right-continuous step functions of t."""
    if pM.t.size == 0:
        return 0.0
    cuts = np.unique(np.concatenate([[0.0], pM.t, pD.t / c]))
    cuts = cuts[cuts < pM.t[-1]]

    def above(prof, x):
        j = np.searchsorted(prof.t, x, side="right")
        return np.where(j < prof.t.size, prof.H[np.minimum(j, prof.t.size - 1)], 0.0)

    num = above(pM, cuts)
    den = above(pD, c * cuts)
    return _sup_ratio(num, den)


def _check_b_decreasing(B: YoungSpec, alpha: float, beta: float) -> None:
    t = np.logspace(-6, 6, 2001)
    r = B(t) / t ** (beta / alpha)
    if np.any(np.diff(r) > 1e-12 * r[:-1]):
        raise ConfigError(f"B(t)/t^(beta/alpha) must be decreasing; fails for {B.describe()} at beta/alpha="
                          f"{beta / alpha:g}")


@register("orlicz_weak", "Phi_1(H({M_{a,B} f > t})) <= C int B(f/t) dH",
          dict(n=1, L=8, alpha=0.25, beta=1.0, samples=20, f_kinds=("bump", "indicator", "random-step")),
          _need_alpha)
def check_orlicz_weak(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    B = parse_young(cfg.young)
    _check_b_decreasing(B, cfg.alpha, cfg.beta)
    E = EndpointFns(cfg.alpha, cfg.beta, B)
    ratios, inner = [], []
    for _, f in _inputs(cfg, root):
        M = _fractional_maximal_orlicz(f, cfg, params, B)
        pM, pf = profile(M, params), profile(f, params)
        if pM.t.size == 0:
            ratios.append(0.0)
            inner.append(0.0)
            continue
        lhs = E.phi1(pM.H)
        rhs = _modular_curve(pf, pM.t, B)
        ratios.append(_sup_ratio(lhs, rhs))
        # the lowest level set is the whole root, where the Luxemburg normalization gives equality
        inner.append(_sup_ratio(lhs[1:], rhs[1:]))
    return [_stable("orlicz_weak", "max_t Phi_1(H({M_{a,B} f > t})) / int B(f/t) dH", ratios),
            LevelClaim("orlicz_weak_below_root", "diagnostic", "the same sup over t above the root average",
                       inner)]


# === Riesz potentials =====================================================================

@register("riesz_strong", "||I_a f||_q <= C ||f||_p and ||M_{a,H} f||_q <= C ||f||_p, q = beta p/(beta - p a)",
          dict(n=1, L=8, alpha=0.25, beta=1.0, p=2.0, samples=20, f_kinds=("bump", "indicator", "random-step")),
          _need_riesz)
def check_riesz_strong(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    a, beta, p = cfg.alpha, cfg.beta, cfg.p
    if not beta / cfg.n < p < beta / a:
        raise ConfigError(f"need p in (beta/n, beta/alpha) = ({beta / cfg.n:g}, {beta / a:g})")
    q = beta * p / (beta - p * a)
    params = _params(cfg)
    rp = _riesz(cfg)
    r1, r2 = [], []
    for _, f in _inputs(cfg, root):
        nf = lp_quasinorm(f, p, params)
        r1.append(ratio(lp_quasinorm(riesz_potential(f, rp), q, params), nf))
        if p > 1:
            Mf = maximal_fractional(f, a, params, cfg.family, budget=cfg.budget)
            r2.append(ratio(lp_quasinorm(Mf, q, params), nf))
    claims = [_stable("riesz", "||I_a f||_q / ||f||_p", r1, extras={"q": q})]
    if p > 1:
        claims.append(_stable("fractional_maximal", "||M_{a,H} f||_q / ||f||_p", r2, extras={"q": q}))
    return claims


def _interior_dyadic(rng, root: RootCube, kmin: int, kmax: int) -> DyadicCube:
    """A dyadic cube of level >= 2 whose centered double stays inside the root."""
    k = int(rng.integers(max(kmin, 2), min(kmax, root.L) + 1))
    return DyadicCube(k, tuple(int(c) for c in rng.integers(1, (1 << k) - 1, root.n)))


@register("riesz_local", "int_Q |I_a f| <= C side^a int_{2Q} |f| for supp f in 2Q",
          dict(n=1, L=8, alpha=0.25, beta=0.6, samples=20), _need_riesz)
def check_riesz_local(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    rp = _riesz(cfg)
    ratios = []
    for i in range(cfg.samples):
        rng = cfg.rng(i, "local")
        Q = _interior_dyadic(rng, root, 2, 4)
        k = Q.level
        if root.L < k + 2:
            raise ConfigError("riesz_local needs L >= level(Q) + 2")
        # random values on level k+2 cells covering the centered dilation 2Q
        sub = 1 << (k + 2)
        vals = rng.uniform(0, 1, (sub,) * cfg.n) * (rng.uniform(size=(sub,) * cfg.n) < 0.7)
        x = _unit_centers(root)
        idx = tuple(np.minimum((xi * sub).astype(int), sub - 1) for xi in x)
        twoQ = centered_dilation(Q, 1, root)
        f = GridFunction(root, vals[idx] * twoQ.mask)
        lhs = choquet_integral(abs(riesz_potential(f, rp)), params, Q)
        rhs = Q.side(root) ** cfg.alpha * choquet_integral(f, params, twoQ)
        ratios.append(ratio(lhs, rhs))
    return [_stable("riesz_local", "int_Q |I_a f| / (side(Q)^a int_2Q |f|)", ratios)]


def farfield_rhs(f: GridFunction, Q, params: ContentParams, alpha: float) -> tuple[float, float]:
    """sum_k 2^-k (2^(k+1) l)^(a - beta) int_{2^(k+1) Q} |f| dH with the exact geometric tail.

    Dilations are centered and clipped to the root; once one covers the root
    every later integral equals int |f|, and the remaining series is summed in
    closed form. Returns (value, tail fraction).
    """
    root = f.root
    beta = params.beta
    ell = Q.side(root)
    terms = []
    k = 0
    while True:
        D = centered_dilation(Q, k + 1, root)
        I = choquet_integral(abs(f), params, D)
        w = 2.0**-k * (2.0 ** (k + 1) * ell) ** (alpha - beta)
        if D.count() == root.num_leaves:
            r = 2.0 ** (alpha - beta - 1)
            tail = I * (2 * ell) ** (alpha - beta) * r**k / (1 - r)
            total = math.fsum(terms) + tail
            return total, (tail / total if total > 0 else 0.0)
        terms.append(w * I)
        k += 1


@register("riesz_farfield", "side^-beta int_Q |I_a f - c| <= C sum_k 2^-k (2^(k+1) l)^(a-beta) int_{2^(k+1)Q} |f| "
          "for supp f off 2Q, c = I_a f(center)",
          dict(n=1, L=8, alpha=0.25, beta=0.6, samples=20), _need_riesz)
def check_riesz_farfield(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    rp = _riesz(cfg)
    ratios, tails = [], []
    for i in range(cfg.samples):
        rng = cfg.rng(i, "far")
        Q = _interior_dyadic(rng, root, 3, 5)
        f0 = _input_recipe("random-step", cfg.n, rng).render(root)
        f = GridFunction(root, f0.values * ~centered_dilation(Q, 1, root).mask)
        box = Q.box(root)
        center = np.array([root.origin[d] + (box.lo[d] + box.size / 2) * root.h for d in range(cfg.n)])
        c = riesz_at_point(f, center, cfg.alpha)
        If = riesz_potential(f, rp)
        lhs = content_average(GridFunction(root, If.values - c), Q, params, denominator="power")
        rhs, tail = farfield_rhs(f, Q, params, cfg.alpha)
        ratios.append(ratio(lhs, rhs))
        tails.append(tail)
    return [_stable("farfield", "side^-beta int_Q |I_a f - c| / far-field series", ratios),
            LevelClaim("tail_fraction", "diagnostic", "share of the series summed in closed form", tails)]


def maximal_kernel(root: RootCube, alpha: float, params: ContentParams) -> np.ndarray:
    """M_H applied to the discrete kernel on all offsets [-N, N)^n (a doubled root)."""
    N, n, h = root.per_axis, root.n, root.h
    big = build_root(n, root.L + 1, 2 * root.side, budget=2 ** (n * (root.L + 1)))
    z = np.arange(-N, N) * h
    r2 = sum(g * g for g in np.meshgrid(*([z] * n), indexing="ij"))
    with np.errstate(divide="ignore"):
        K = r2 ** ((alpha - n) / 2)
    K[(N,) * n] = self_cell_constant(n, alpha) * h ** (alpha - n)
    return maximal_content(GridFunction(big, K), params).values


def kernel_convolution(MK: np.ndarray, f: GridFunction) -> np.ndarray:
    """x -> sum_y MK(x - y) |f(y)| h^n, with MK indexed by offsets in [-N, N)^n."""
    root = f.root
    N = root.per_axis
    full = fftconvolve(np.abs(f.values), MK, mode="full")
    return full[(slice(N, 2 * N),) * root.n] * root.h**root.n


RHI_R = (0.05, 0.1, 0.2)


@register("riesz_a1", "M(I_a f) <= (M I_a) * f, M(I_a f) <= C I_a f, reverse Hoelder for w = I_a f",
          dict(n=1, L=7, alpha=0.5, beta=0.75, samples=20, f_kinds=("bump", "indicator", "random-step")),
          _need_riesz)
def check_riesz_a1(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    rp = _riesz(cfg)
    endpoint = cfg.n - cfg.alpha < cfg.beta <= cfg.n
    MK = maximal_kernel(root, cfg.alpha, params)
    d1, d2 = [], []
    rhi = {r: [] for r in RHI_R}
    for _, f in _inputs(cfg, root):
        w = riesz_potential(f, rp)
        Mw = maximal_content(w, params, cfg.family, budget=cfg.budget)
        d1.append(_sup_ratio(Mw.values, kernel_convolution(MK, f)))
        if endpoint:
            d2.append(_sup_ratio(Mw.values, w.values))
        fp = family_profiles(w, params, "dyadic")
        for r in RHI_R:
            best = 0.0
            for g in fp.groups:
                den = g.side**params.beta
                hi = g.layer_sum(lambda t: t ** (1 + r), den) ** (1 / (1 + r))
                lo = g.layer_sum(None, den)
                best = max(best, _sup_ratio(hi, lo))
            rhi[r].append(best)
    claims = [_stable("kernel_domination", "M(I_a f) / ((M I_a) * |f|)", d1)]
    if endpoint:
        claims.append(_stable("a1", "M(I_a f) / I_a f", d2))
    claims += [_stable(f"reverse_holder_r{r:g}", f"(mean w^(1+{r:g}))^(1/(1+{r:g})) / mean w over dyadic Q",
                       rhi[r]) for r in RHI_R]
    return claims


@register("riesz_pointwise_domination", "M_{a,H} f <= C R^beta_a f",
          dict(n=1, L=6, alpha=0.25, beta=0.6, samples=20, f_kinds=("bump", "indicator", "random-step")),
          _need_riesz)
def check_riesz_pointwise_domination(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    ratios = []
    for _, f in _inputs(cfg, root):
        M = maximal_fractional(f, cfg.alpha, params, cfg.family, budget=cfg.budget)
        R = beta_riesz_potential(f, cfg.alpha, params)
        ratios.append(_sup_ratio(M.values, R.values))
    return [_stable("domination", "M_{a,H} f / R^beta_a f", ratios)]


# === commutators ===========================================================================

def _pointwise_terms(b, nb, f, cfg, params, B, rp):
    """LHS M#([b, I] f) and the pieces of every right-hand side."""
    C = commutator(b, f, rp)
    Ms = maximal_sharp(C, params, cfg.family, budget=cfg.budget)
    If = riesz_potential(f, rp)
    MB = _fractional_maximal_orlicz(f, cfg, params, B)
    return C, Ms, If, MB


def _decomposition_terms(b, f, If, Q: DyadicCube, params, rp, alpha) -> tuple[float, float, float]:
    """The three terms of the splitting f = f chi_{2Q} + f chi_{(2Q)^c} on one cube."""
    root = b.root
    star = dilate(Q, 1, root)
    bstar = oscillation(b, star, params).c_star
    d = GridFunction(root, b.values - bstar)
    inside = np.zeros(root.shape, bool)
    inside[star.slices()] = True
    f1 = GridFunction(root, f.values * inside)
    f2 = GridFunction(root, f.values * ~inside)
    I1 = content_average(d * If, Q, params, denominator="power")
    I2 = content_average(riesz_potential(d * f1, rp), Q, params, denominator="power")
    g2 = d * f2
    box = Q.box(root)
    center = np.array([root.origin[k] + (box.lo[k] + box.size / 2) * root.h for k in range(root.n)])
    c = riesz_at_point(g2, center, alpha)
    I3 = content_average(GridFunction(root, riesz_potential(g2, rp).values - c), Q, params, denominator="power")
    return I1, I2, I3


@register("pointwise_sharp", "M#([b, I_a] f) <= C ||b|| (M((I_a f)^s)^(1/s) + M_{a,B} f) and its variants",
          dict(n=1, L=8, alpha=0.25, beta=0.6, samples=20, s=(1.5, 2.0), t=(1.5, 2.0)), _need_riesz)
def check_pointwise_sharp(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    B = parse_young(cfg.young)
    rp = _riesz(cfg)
    a, beta, n = cfg.alpha, cfg.beta, cfg.n
    endpoint = n - a < beta <= n
    ts = [t for t in cfg.t if a * t < beta]
    sharp_s = {s: [] for s in cfg.s}
    sharp_end = []
    frac = {(s, t): [] for s in cfg.s for t in ts}
    diag = {k: [] for k in ("I1", "I2", "I3")}
    for i, b, nb, f in _symbol_pairs(cfg, root, params):
        C, Ms, If, MB = _pointwise_terms(b, nb, f, cfg, params, B, rp)
        lhs = Ms.values
        Mis = {s: maximal_content(GridFunction(root, np.abs(If.values) ** s), params, cfg.family,
                                  budget=cfg.budget).values ** (1 / s) for s in cfg.s}
        for s in cfg.s:
            sharp_s[s].append(_sup_ratio(lhs, nb * (Mis[s] + MB.values)))
        if endpoint:
            sharp_end.append(_sup_ratio(lhs, nb * (If.values + MB.values)))
        for t in ts:
            Mt = maximal_fractional(GridFunction(root, f.values**t), a * t, params, cfg.family,
                                    budget=cfg.budget).values ** (1 / t)
            for s in cfg.s:
                frac[(s, t)].append(_sup_ratio(lhs, nb * (Mis[s] + Mt)))
        if i < cfg.diag_samples and nb > 0:
            rhs = nb * (Mis[cfg.s[0]] + MB.values)
            best = [0.0, 0.0, 0.0]
            for k in range(2, min(root.L, 5) + 1):
                for coords in np.ndindex(*([1 << k] * n)):
                    Q = DyadicCube(k, tuple(int(x) for x in coords))
                    terms = _decomposition_terms(b, f, If, Q, params, rp, a)
                    floor = float(np.min(rhs[Q.box(root).slices()]))
                    for j in range(3):
                        best[j] = max(best[j], ratio(terms[j], floor))
            for j, k in enumerate(("I1", "I2", "I3")):
                diag[k].append(best[j])
    claims = [_stable(f"sharp_s{s:g}", f"M#([b,I]f) / (||b|| (M((I f)^{s:g})^(1/{s:g}) + M_(a,B) f))", sharp_s[s])
              for s in cfg.s]
    if endpoint:
        claims.append(_stable("sharp_endpoint", "M#([b,I]f) / (||b|| (I f + M_(a,B) f))", sharp_end))
    for (s, t), r in frac.items():
        claims.append(_stable(f"sharp_fractional_s{s:g}_t{t:g}",
                              f"M#([b,I]f) / (||b|| (M((I f)^{s:g})^(1/{s:g}) + M_(a{t:g},H)(f^{t:g})^(1/{t:g})))",
                              r))
    for k, r in diag.items():
        claims.append(LevelClaim(f"decomposition_{k}", "diagnostic",
                                 f"{k} over dyadic Q / min_Q ||b|| (M((I f)^s)^(1/s) + M_(a,B) f)", r))
    return claims


def commutator_norm_ratio(b, f, pair, params, rp) -> tuple[float, float]:
    C = commutator(b, f, rp)
    return lp_quasinorm(C, pair.q, params), lp_quasinorm(f, pair.p, params)


@register("strong_type", "||[b, I_a] f||_q <= C ||b|| ||f||_p",
          dict(n=1, L=8, alpha=0.25, beta=0.6, p=2.0, samples=20), _need_pair)
def check_strong_type(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    pair = cfg.exponents()
    rp = _riesz(cfg)
    ratios = []
    for _, b, nb, f in _symbol_pairs(cfg, root, params):
        num, nf = commutator_norm_ratio(b, f, pair, params, rp)
        ratios.append(ratio(num, nb * nf))
    return [_stable("strong_type", "||[b,I]f||_q / (||b|| ||f||_p)", ratios, extras={"q": pair.q})]


def operator_norm_family(b: GridFunction, cfg: CheckConfig, random_f: int = 8, witness: bool = True):
    """Inputs for the operator-norm estimate: seeded random f plus the Fourier witnesses.

    Items are ``(re, im)`` pairs; ``im`` is None for real inputs.
    """
    root = b.root
    out = []
    for j in range(random_f):
        kind = cfg.f_kinds[j % len(cfg.f_kinds)]
        out.append((_input_recipe(kind, cfg.n, cfg.rng(j, "opnorm")).render(root), None))
    if witness:
        for Q in witness_cubes(root, 2, 4):
            for _, re, im in fourier_witness(b, Q, kmax=2).tests:
                out.append((re, im))
    return out


def estimate_operator_norm_on(b: GridFunction, family, pair, params: ContentParams, rp: RieszParams) -> float:
    """max over the family of ||[b, I] f||_q / ||f||_p; complex inputs count with modulus, real and
    imaginary parts."""
    root = b.root
    best = 0.0
    for re, im in family:
        Cr = commutator(b, re, rp)
        cand = [(Cr, re)]
        if im is not None:
            Ci = commutator(b, im, rp)
            cand.append((Ci, im))
            mod_c = GridFunction(root, np.hypot(Cr.values, Ci.values))
            mod_f = GridFunction(root, np.hypot(re.values, im.values))
            cand.append((mod_c, mod_f))
        for C, f in cand:
            best = max(best, ratio(lp_quasinorm(C, pair.q, params), lp_quasinorm(f, pair.p, params)))
    return best


@register("necessity", "c ||b|| <= ||[b, I_a]||_(p,q) <= C ||b|| with the norm estimated over random and "
          "Fourier-witness inputs",
          dict(n=1, L=8, alpha=0.25, beta=0.6, p=2.0, samples=20), _need_pair)
def check_necessity(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    pair = cfg.exponents()
    rp = _riesz(cfg)
    lower, upper = [], []
    for _, b in _symbols(cfg, root, params):
        nb = bmo_norm(b, params, cfg.family, budget=cfg.budget)
        N = estimate_operator_norm_on(b, operator_norm_family(b, cfg), pair, params, rp)
        lower.append(ratio(nb, N))
        upper.append(ratio(N, nb))
    return [_stable("lower", "||b|| / ||[b,I]||_emp", lower), _stable("upper", "||[b,I]||_emp / ||b||", upper)]


@register("modular_weak", "H({|[b, I_a] f| > t}) <= C Psi(int B(||b|| |f| / t) dH) and the weak-type Riesz bound",
          dict(n=1, L=8, alpha=0.5, beta=0.75, samples=20), _need_endpoint)
def check_modular_weak(cfg: CheckConfig, root: RootCube) -> list[LevelClaim]:
    params = _params(cfg)
    B = parse_young(cfg.young)
    E = EndpointFns(cfg.alpha, cfg.beta, B)
    rp = _riesz(cfg)
    gamma = cfg.beta / (cfg.beta - cfg.alpha)
    mod, weak = [], []
    for _, b, nb, f in _symbol_pairs(cfg, root, params):
        pf = profile(f, params)
        C = commutator(b, f, rp)
        pC = profile(C, params)
        if pC.t.size:
            mod.append(_sup_ratio(pC.H, E.psi(_modular_curve(pf, pC.t, B, nb))))
        else:
            mod.append(0.0)
        pI = profile(riesz_potential(f, rp), params)
        F = pf.integral()
        weak.append(_sup_ratio(pI.H, (F / pI.t) ** gamma) if pI.t.size else 0.0)
    return [_stable("modular_weak", "max_t H({|[b,I]f| >= t}) / Psi(int B(||b|| |f| / t) dH)", mod),
            _stable("riesz_weak", "max_t H({I f >= t}) / ((int f dH) / t)^(beta/(beta-alpha))", weak)]


CHECK_IDS = tuple(CHECKS)
