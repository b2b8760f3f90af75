"""Maximal operators, Riesz potentials and commutators."""

from .maximal import (MaximalError, maximal_content, maximal_fractional, maximal_orlicz_fractional,
                      maximal_sharp)
from .riesz import (RieszError, RieszParams, beta_riesz_potential, commutator, iterated_commutator,
                    kernel_array, riesz_at_point, riesz_potential, self_cell_constant)
from .exponents import ExponentPair

__all__ = [
    "ExponentPair", "MaximalError", "RieszError", "RieszParams", "beta_riesz_potential", "commutator",
    "iterated_commutator", "kernel_array", "maximal_content", "maximal_fractional",
    "maximal_orlicz_fractional", "maximal_sharp", "riesz_at_point", "riesz_potential", "self_cell_constant",
]
