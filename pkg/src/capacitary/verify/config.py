"""Check configuration: one flat record per run, validated per check family."""

from __future__ import annotations

import dataclasses
import zlib
from dataclasses import dataclass

import numpy as np

from ..operators.exponents import ExponentError, ExponentPair


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CheckConfig:
    """Everything a check needs. ``q`` is derived from ``p`` when left unset.

    ``levels`` are the leaf depths compared for refinement stability; by
    default ``(L, L + 1)``.
    """

    check_id: str = ""
    n: int = 1
    L: int = 6
    beta: float = 1.0
    alpha: float = 0.25
    p: float = 2.0
    q: float | None = None
    s: tuple[float, ...] = (1.5, 2.0)
    t: tuple[float, ...] = (1.5, 2.0)
    family: str = "dyadic"
    samples: int = 20
    seed: int = 0
    levels: tuple[int, ...] | None = None
    b_kinds: tuple[str, ...] = ("bmo-log", "random-step-bmo")
    f_kinds: tuple[str, ...] = ("bump", "indicator")
    young: str = "t*log(e+t)"
    stability: float = 2.0
    budget: int = 20_000
    diag_samples: int = 4

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ConfigError("n must be 1, 2 or 3")
        if self.L < 1:
            raise ConfigError("L must be >= 1")
        if not 0 < self.beta <= self.n:
            raise ConfigError(f"beta must lie in (0, {self.n}]")
        if self.samples < 1:
            raise ConfigError("need at least one sample")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if not self.stability >= 1:
            raise ConfigError("stability threshold must be >= 1")
        for name in ("s", "t", "b_kinds", "f_kinds"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.levels is not None:
            object.__setattr__(self, "levels", tuple(int(x) for x in self.levels))

    # -- derived quantities
    @property
    def refinement(self) -> tuple[int, ...]:
        return self.levels if self.levels else (self.L, self.L + 1)

    def exponents(self) -> ExponentPair:
        """The strong-type pair (p, q) with 1/p - 1/q = alpha/beta."""
        try:
            pair = ExponentPair(self.p, self.alpha, self.beta)
        except ExponentError as exc:
            raise ConfigError(str(exc)) from None
        if self.q is not None and not np.isclose(self.q, pair.q, rtol=1e-12):
            raise ConfigError(f"q={self.q} violates 1/p - 1/q = alpha/beta (expected {pair.q:.12g})")
        return pair

    def require_endpoint(self) -> None:
        """beta must lie in (n - alpha, n]."""
        if not (self.n - self.alpha < self.beta <= self.n):
            raise ConfigError(f"need beta in (n - alpha, n] = ({self.n - self.alpha:g}, {self.n}], got {self.beta}")

    def require_alpha(self) -> None:
        if not 0 < self.alpha < self.beta:
            raise ConfigError(f"need 0 < alpha < beta, got alpha={self.alpha}, beta={self.beta}")

    def rng(self, idx: int, stream: str = "") -> np.random.Generator:
        """Per-sample generator; independent of the leaf depth so refinements see the same draws."""
        tag = zlib.crc32((self.check_id + "/" + stream).encode())
        return np.random.default_rng(np.random.SeedSequence([self.seed, idx, tag]))

    def with_(self, **kw) -> "CheckConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(CheckConfig)}


def parse_value(key: str, text: str):
    """Parse a flat ``key = value`` entry into the field's type."""
    if key not in FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    text = text.strip()
    kind = FIELD_TYPES[key]
    if key in ("check_id", "family", "young"):
        return text
    if key in ("b_kinds", "f_kinds"):
        return tuple(x.strip() for x in text.split(",") if x.strip())
    if key in ("s", "t"):
        return tuple(float(x) for x in text.split(",") if x.strip())
    if key == "levels":
        return None if text in ("", "none", "None") else tuple(int(x) for x in text.split(","))
    if key == "q":
        return None if text in ("", "none", "None") else float(text)
    if "int" in str(kind):
        return int(text)
    return float(text)


def config_from_mapping(base: CheckConfig, values: dict) -> CheckConfig:
    parsed = {k: (parse_value(k, v) if isinstance(v, str) else v) for k, v in values.items()}
    unknown = set(parsed) - set(FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    return dataclasses.replace(base, **parsed)


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for num, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{num}: expected key = value")
            key, value = (x.strip() for x in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in FIELD_TYPES:
                raise ConfigError(f"{path}:{num}: unknown configuration key {key!r}")
            out[key] = value
    return out
