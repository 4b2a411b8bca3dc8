from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from games.models import InducedMC

TOP = "__top__"
BOT = "__bot__"


@dataclass(frozen=True)
class FpNumber:
    """
    mantissa · 2^exponent with 0 ≤ mantissa < 2^ell.

    Canonical form: zero is (0, 0), any other number has an odd mantissa.
    """
    mantissa: int
    exponent: int
    ell: int

    @property
    def value(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def __str__(self):
        return f"{self.mantissa}*2^{self.exponent}"


@dataclass(frozen=True)
class FpDistribution:
    """μ(i) = wᵢ / Σⱼ wⱼ over floating-point weights of one precision."""
    weights: Tuple[FpNumber, ...]
    ell: int

    @property
    def total(self) -> Fraction:
        return sum((w.value for w in self.weights), Fraction(0))

    @property
    def probabilities(self) -> Tuple[Fraction, ...]:
        total = self.total
        return tuple(w.value / total for w in self.weights)


@dataclass(frozen=True)
class ReachMC:
    """
    Reachability chain over `states`, which end with the absorbing TOP (target) and BOT.

    `source` keeps the discounted chain a reduction was built from so that
    rounding can redo the construction with truncating operations.
    """
    states: Tuple[str, ...]
    transition: Dict[str, Tuple[Fraction, ...]]
    source: Optional[InducedMC] = None

    @property
    def transient(self) -> Tuple[str, ...]:
        return tuple(s for s in self.states if s not in (TOP, BOT))

    def p(self, s: str, t: str) -> Fraction:
        return self.transition[s][self.states.index(t)]
