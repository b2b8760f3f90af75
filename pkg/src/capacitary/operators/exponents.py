from __future__ import annotations

from dataclasses import dataclass, field


class ExponentError(ValueError):
    pass


@dataclass(frozen=True)
class ExponentPair:
    """Exponents with 1/p - 1/q = alpha/beta and 1 < p < beta/alpha."""

    p: float
    alpha: float
    beta: float
    q: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.alpha < self.beta:
            raise ExponentError("need 0 < alpha < beta")
        if not 1 < self.p < self.beta / self.alpha:
            raise ExponentError(f"p={self.p} outside (1, beta/alpha) = (1, {self.beta / self.alpha:g})")
        object.__setattr__(self, "q", 1.0 / (1.0 / self.p - self.alpha / self.beta))
