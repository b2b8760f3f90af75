"""Maximal operators over cube families, each a per-leaf sup of per-cube quantities."""

from __future__ import annotations

import numpy as np

from ..bmo import family_oscillations
from ..choquet import family_profiles
from ..content import ContentParams
from ..lattice import GridFunction
from ..young import YoungSpec, luxemburg_group


class MaximalError(ValueError):
    pass


def _denominators(group, params: ContentParams, denominator: str) -> np.ndarray:
    if denominator == "content":
        return group.content
    if denominator == "power":
        return group.side**params.beta
    raise MaximalError(f"unknown denominator {denominator!r}")


def maximal_content(f: GridFunction, params: ContentParams, family: str = "dyadic",
                    denominator: str = "content", **kw) -> GridFunction:
    """sup over cubes Q containing x of H(Q)^-1 int_Q |f| dH."""
    fp = family_profiles(f, params, family, **kw)
    vals = [g.layer_sum(denom=_denominators(g, params, denominator)) for g in fp.groups]
    return GridFunction(f.root, fp.scatter_max(vals))


def maximal_sharp(f: GridFunction, params: ContentParams, family: str = "dyadic", p: float = 1.0,
                  **kw) -> GridFunction:
    """sup over cubes Q containing x of inf_c side(Q)^-beta int_Q |f - c| dH."""
    osc = family_oscillations(f, params, family, p, **kw)
    return GridFunction(f.root, osc.scatter_max())


def maximal_fractional(f: GridFunction, alpha_weight: float, params: ContentParams, family: str = "dyadic",
                       denominator: str = "content", **kw) -> GridFunction:
    """sup over cubes of side(Q)^alpha H(Q)^-1 int_Q |f| dH."""
    if not 0 <= alpha_weight < params.beta:
        raise MaximalError(f"fractional order must lie in [0, beta), got {alpha_weight}")
    fp = family_profiles(f, params, family, **kw)
    vals = [g.side**alpha_weight * g.layer_sum(denom=_denominators(g, params, denominator)) for g in fp.groups]
    return GridFunction(f.root, fp.scatter_max(vals))


def maximal_orlicz_fractional(f: GridFunction, alpha_weight: float, B: YoungSpec, params: ContentParams,
                              family: str = "dyadic", **kw) -> GridFunction:
    """sup over cubes of side(Q)^alpha times the mean Luxemburg norm of f on Q."""
    if not 0 <= alpha_weight < params.beta:
        raise MaximalError(f"fractional order must lie in [0, beta), got {alpha_weight}")
    fp = family_profiles(f, params, family, **kw)
    vals = [g.side**alpha_weight * luxemburg_group(g, B, params.beta) for g in fp.groups]
    return GridFunction(f.root, fp.scatter_max(vals))
