"""Young functions, their complementary functions, h_B, the endpoint pair
(Psi, Phi_1), and Luxemburg norms built on Choquet integrals."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .choquet import ProfileGroup, profile
from .content import ContentParams
from .lattice import GridFunction, as_box

INVPHI = (math.sqrt(5) - 1) / 2
H_WINDOW = (1e-8, 1e8)
H_TAILS = (1e-250, 1e250)
KINDS = ("power", "tlog", "expm1", "table", "complementary")


class YoungError(ValueError):
    pass


class LuxemburgError(RuntimeError):
    pass


@dataclass(frozen=True)
class YoungSpec:
    """A Young function B.

    kinds: ``power`` (t^r), ``tlog`` (t^a log(e+t)^b; a=b=1 is t log(e+t)),
    ``expm1`` (e^t - 1), ``table`` (piecewise linear through (0,0) and the
    given knots, extended with the last slope) and ``complementary`` (the
    Legendre transform of ``base``).
    """

    kind: str
    params: tuple[float, ...] = ()
    base: "YoungSpec | None" = field(default=None, compare=True)
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise YoungError(f"unknown Young function kind {self.kind!r}")
        if self.kind == "power" and not (len(self.params) == 1 and self.params[0] >= 1):
            raise YoungError("power Young function needs r >= 1")
        if self.kind == "tlog" and not (len(self.params) == 2 and self.params[0] >= 1 and self.params[1] >= 0):
            raise YoungError("t^a log(e+t)^b needs a >= 1 and b >= 0")
        if self.kind == "table":
            xs, ys = self._table()
            if len(xs) < 1 or np.any(np.diff(xs) <= 0) or xs[0] <= 0:
                raise YoungError("table knots must be positive and increasing")
        if self.kind == "complementary" and self.base is None:
            raise YoungError("complementary function needs a base")
        self._validate()

    # -- construction helpers
    @classmethod
    def power(cls, r: float) -> "YoungSpec":
        return cls("power", (float(r),))

    @classmethod
    def tlog(cls, a: float = 1.0, b: float = 1.0) -> "YoungSpec":
        return cls("tlog", (float(a), float(b)))

    @classmethod
    def expm1(cls) -> "YoungSpec":
        return cls("expm1")

    @classmethod
    def table(cls, xs, ys) -> "YoungSpec":
        return cls("table", tuple(float(x) for x in xs) + tuple(float(y) for y in ys))

    def complementary(self) -> "YoungSpec":
        return YoungSpec("complementary", (), self)

    def _table(self):
        h = len(self.params) // 2
        return np.array(self.params[:h]), np.array(self.params[h:])

    def _validate(self):
        t = np.logspace(-6, 6, 241)
        v = self(t)
        if self(np.zeros(1))[0] != 0.0:
            raise YoungError("B(0) must be 0")
        strict = self.kind != "complementary"
        with np.errstate(invalid="ignore"):
            dv = np.diff(v)
        if np.any(dv < 0) or (strict and np.any(dv <= 0) and np.all(np.isfinite(v))):
            raise YoungError("Young function must be increasing")
        slopes = dv / np.diff(t)
        finite = np.isfinite(slopes)
        if np.any(np.diff(slopes[finite]) < -1e-9 * np.abs(slopes[finite][1:]) - 1e-12):
            raise YoungError("Young function must be convex")

    # -- evaluation
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise YoungError("Young functions take nonnegative arguments")
        k = self.kind
        if k == "power":
            return t ** self.params[0]
        if k == "tlog":
            a, b = self.params
            return t**a * np.log(math.e + t) ** b
        if k == "expm1":
            with np.errstate(over="ignore"):
                return np.expm1(t)
        if k == "table":
            xs, ys = self._table()
            x = np.concatenate([[0.0], xs])
            y = np.concatenate([[0.0], ys])
            slope = (y[-1] - y[-2]) / (x[-1] - x[-2])
            return np.where(t <= x[-1], np.interp(t, x, y), y[-1] + slope * (t - x[-1]))
        return complementary_eval(self.base, t)

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.kind == "power":
            return f"pow:{self.params[0]:g}"
        if self.kind == "tlog":
            a, b = self.params
            return "t*log(e+t)" if (a, b) == (1.0, 1.0) else f"tlog:{a:g},{b:g}"
        if self.kind == "expm1":
            return "exp-1"
        if self.kind == "table":
            return "table:" + ",".join(f"{x:g}" for x in self.params)
        return f"conj({self.base.describe()})"


def parse_young(text: str) -> YoungSpec:
    """Parse ``B=t*log(e+t)``, ``B=pow:2``, ``tlog:1,2``, ``exp-1`` or ``table:x1,...,y1,...``."""
    s = text.strip().replace(" ", "")
    if s.startswith("B="):
        s = s[2:]
    if s in ("t*log(e+t)", "tlog(e+t)", "tlog", "LlogL"):
        return YoungSpec.tlog(1, 1)
    if s in ("t", "pow:1"):
        return YoungSpec.power(1)
    m = re.fullmatch(r"pow:([0-9.eE+-]+)", s) or re.fullmatch(r"t\^([0-9.eE+-]+)", s)
    if m:
        return YoungSpec.power(float(m.group(1)))
    m = re.fullmatch(r"tlog:([0-9.eE+-]+),([0-9.eE+-]+)", s)
    if m:
        return YoungSpec.tlog(float(m.group(1)), float(m.group(2)))
    if s in ("exp-1", "exp(t)-1", "e^t-1", "expm1"):
        return YoungSpec.expm1()
    if s.startswith("table:"):
        vals = [float(x) for x in s[6:].split(",")]
        if len(vals) % 2:
            raise YoungError("table needs as many values as knots")
        h = len(vals) // 2
        return YoungSpec.table(vals[:h], vals[h:])
    raise YoungError(f"cannot parse Young function {text!r}")


def parse_endpoint(text: str) -> "EndpointFns":
    """Parse ``Psi:alpha=0.25,beta=1`` (an optional ``B=...`` part after ``;``)."""
    s = text.strip().replace(" ", "")
    head, _, rest = s.partition(";")
    if not head.startswith(("Psi:", "Phi1:")):
        raise YoungError(f"cannot parse endpoint spec {text!r}")
    kv = dict(item.split("=", 1) for item in head.split(":", 1)[1].split(","))
    B = parse_young(rest) if rest else YoungSpec.tlog(1, 1)
    return EndpointFns(float(kv["alpha"]), float(kv["beta"]), B)


# --- complementary function ---------------------------------------------------------

def _golden_max(fn, a, b, iters=120):
    """Vectorized golden-section maximization of concave ``fn`` on ``[a, b]``."""
    a = np.array(a, float)
    b = np.array(b, float)
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        left = f1 >= f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        nx1 = b - INVPHI * (b - a)
        nx2 = a + INVPHI * (b - a)
        x2n = np.where(left, x1, nx2)
        x1n = np.where(left, nx1, x2)
        f1n = np.where(left, fn(x1n), f2)
        f2n = np.where(left, f1, fn(x2n))
        x1, x2, f1, f2 = x1n, x2n, f1n, f2n
    return np.maximum(f1, f2), np.where(f1 >= f2, x1, x2)


def complementary_eval(B: YoungSpec, t) -> np.ndarray:
    """B-bar(t) = sup_s (s t - B(s)), by golden section over a doubled bracket."""
    t = np.atleast_1d(np.asarray(t, float))
    if np.any(t < 0):
        raise YoungError("complementary function takes nonnegative arguments")
    out = np.zeros_like(t)
    pos = t > 0
    if not pos.any():
        return out
    tt = t[pos]

    def g(s):
        with np.errstate(over="ignore", invalid="ignore"):
            return s * tt - B(s)

    hi = np.full(tt.shape, 1e-8)
    for _ in range(120):
        grow = g(2 * hi) >= g(hi)
        if not grow.any():
            break
        hi = np.where(grow, 2 * hi, hi)
    val, _ = _golden_max(g, np.zeros_like(tt), 2 * hi)
    out[pos] = np.maximum(val, 0.0)
    return out


# --- h_B -------------------------------------------------------------------------------

def h_B(B: YoungSpec, s) -> np.ndarray:
    """sup over t in the search window of B(s t)/B(t), refined by golden section in log t."""
    s = np.atleast_1d(np.asarray(s, float))
    out = np.zeros_like(s)
    pos = np.nonzero(s > 0)[0]
    if not pos.size:
        return out
    grid = np.logspace(math.log10(H_WINDOW[0]), math.log10(H_WINDOW[1]), 1601)
    lg = np.log(grid)
    Bt = B(grid)
    sp = s[pos]
    best = np.empty(sp.size)
    a = np.empty(sp.size)
    b = np.empty(sp.size)
    for lo in range(0, sp.size, 256):
        blk = sp[lo:lo + 256]
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = B(blk[:, None] * grid[None, :]) / Bt[None, :]
        ratio = np.where(np.isfinite(ratio), ratio, -np.inf)
        j = np.argmax(ratio, axis=1)
        best[lo:lo + 256] = ratio[np.arange(blk.size), j]
        a[lo:lo + 256] = lg[np.maximum(j - 1, 0)]
        b[lo:lo + 256] = lg[np.minimum(j + 1, len(lg) - 1)]

    def fn(x):
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(x)
            r = B(sp * e) / B(e)
        return np.where(np.isfinite(r), r, -np.inf)

    val, _ = _golden_max(fn, a, b, iters=80)
    # the limits t -> 0 and t -> inf, read off far outside the window
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        tails = [B(sp * t) / B(np.array(t)) for t in H_TAILS]
    tails = np.max([np.where(np.isfinite(x), x, -np.inf) for x in tails], axis=0)
    out[pos] = np.maximum(np.maximum(val, best), tails)
    return out


@dataclass(frozen=True)
class EndpointFns:
    """Psi(t) = [t log(e + t^(alpha/beta))]^(beta/(beta-alpha)) and Phi_1(s) = s / h_B(s^(alpha/beta))."""

    alpha: float
    beta: float
    B: YoungSpec = field(default_factory=lambda: YoungSpec.tlog(1, 1))

    def __post_init__(self):
        if not 0 < self.alpha < self.beta:
            raise YoungError(f"endpoint functions need 0 < alpha < beta, got alpha={self.alpha}, beta={self.beta}")

    def psi(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        a, b = self.alpha, self.beta
        with np.errstate(over="ignore"):
            return (t * np.log(math.e + t ** (a / b))) ** (b / (b - a))

    def phi1(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, float))
        out = np.zeros_like(s)
        pos = s > 0
        if pos.any():
            out[pos] = s[pos] / h_B(self.B, s[pos] ** (self.alpha / self.beta))
        return out


def endpoint_eval(E: EndpointFns, which: str, t) -> np.ndarray:
    if which in ("Psi", "psi"):
        return E.psi(t)
    if which in ("Phi1", "phi1"):
        return E.phi1(t)
    raise YoungError(f"unknown endpoint function {which!r}")


# --- Luxemburg norms ------------------------------------------------------------------

def luxemburg_from_profiles(T: np.ndarray, H: np.ndarray, denom: np.ndarray, B: YoungSpec,
                            rtol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """inf{lambda : sum_j (B(T_j/lambda) - B(T_{j-1}/lambda)) H_j / denom <= 1}, row by row.

    Rows are padded layer profiles (see ``ProfileGroup``). Power functions use
    their closed form; everything else is bracketed by doubling and bisected.
    """
    T = np.atleast_2d(T)
    H = np.atleast_2d(H)
    denom = np.broadcast_to(np.asarray(denom, float), (T.shape[0],))
    Hn = H / denom[:, None]
    tmax = T[:, -1] if T.shape[1] else np.zeros(T.shape[0])
    out = np.zeros(T.shape[0])
    live = tmax > 0
    if not live.any():
        return out
    if B.kind == "power":
        r = B.params[0]
        dphi = np.diff(T**r, axis=1, prepend=0.0)
        out[live] = np.sum(dphi * Hn, axis=1)[live] ** (1.0 / r)
        return out
    T, Hn, tmax = T[live], Hn[live], tmax[live]

    def modular(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = B(T / lam[:, None])
        dphi = np.diff(vals, axis=1, prepend=0.0)
        with np.errstate(invalid="ignore"):
            m = np.sum(np.where(Hn > 0, dphi * Hn, 0.0), axis=1)
        return np.where(np.isnan(m), np.inf, m)

    hi = tmax.copy()
    for _ in range(2100):
        bad = modular(hi) > 1
        if not bad.any():
            break
        hi = np.where(bad, hi * 2, hi)
    lo = hi.copy()
    for _ in range(2100):
        ok = modular(lo) <= 1
        if not ok.any():
            break
        lo = np.where(ok, lo / 2, lo)
    for _ in range(max_iter):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = 0.5 * (lo + hi)
        ok = modular(mid) <= 1
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    else:
        if not np.all(hi - lo <= rtol * hi):
            raise LuxemburgError("Luxemburg bisection did not converge in 200 steps")
    out[live] = lo
    return out


def luxemburg_mean(f: GridFunction, Q, B: YoungSpec, params: ContentParams) -> float:
    """Mean Luxemburg norm on Q, with the modular normalized by side(Q)^beta."""
    root = f.root
    box = as_box(Q, root)
    prof = profile(f, params, box)
    denom = box.side(root) ** params.beta
    return float(luxemburg_from_profiles(prof.t[None, :], prof.H[None, :], np.array([denom]), B)[0])


def luxemburg_global(f: GridFunction, E, B: YoungSpec, params: ContentParams) -> float:
    """Luxemburg norm over a region (a LeafSet, a cube, or the whole root)."""
    prof = profile(f, params, E)
    return float(luxemburg_from_profiles(prof.t[None, :], prof.H[None, :], np.ones(1), B)[0])


def luxemburg_group(group: ProfileGroup, B: YoungSpec, beta: float) -> np.ndarray:
    """Mean Luxemburg norms of every cube in a profile group."""
    return luxemburg_from_profiles(group.T, group.H, group.side**beta, B)
