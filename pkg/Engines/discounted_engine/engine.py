from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple
import logging

from games.models import DiscountSpec, GameSpec
from games.services import validate_discount, validate_game, with_rewards
from kernel.models import KernelTable
from kernel.services import build_kernel
from matrixgames.services import game_value

logger = logging.getLogger(__name__)

Rewards = Dict[Tuple[str, str, str], Fraction]


@dataclass(frozen=True)
class Bracket:
    """Certified enclosure [lo, hi] of the discounted value after `iterations` halvings."""
    lo: Fraction
    hi: Fraction
    iterations: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


class DiscountedEngine:
    """
    Bisection on z driven by the sign of val(W(z)).

    val(W(z)) is strictly decreasing in z and vanishes exactly at the
    discounted value, so val(W(z)) ≥ 0 means the value is at least z.
    """

    def __init__(self, game: GameSpec, state: str, disc: DiscountSpec, rewards: Optional[Rewards] = None):
        self.game = with_rewards(game, rewards) if rewards is not None else validate_game(game)
        self.disc = validate_discount(self.game, disc)
        if state not in self.game.states:
            raise ValueError(f"unknown state {state}")
        self.state = state
        self.table: KernelTable = build_kernel(self.game, self.disc, state)

    def probe(self, z: Fraction) -> Fraction:
        return game_value(self.table.at(z)).value

    def sign(self, z: Fraction) -> int:
        nu = self.probe(z)
        return (nu > 0) - (nu < 0)

    def run(self, eps: Fraction) -> Tuple[Fraction, Bracket]:
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        lo, hi = Fraction(0), Fraction(1)
        iterations = 0
        while hi - lo > eps:
            z = (lo + hi) / 2
            nu = self.probe(z)
            if nu >= 0:
                lo = z
            else:
                hi = z
            iterations += 1
            logger.debug(f"Bisection step {iterations}: z={z} val(W)={float(nu):.3e} -> [{lo}, {hi}]")
        bracket = Bracket(lo, hi, iterations)
        value = (lo + hi) / 2
        logger.info(f"Discounted value at {self.state}: {value} in [{lo}, {hi}] after {iterations} iterations")
        return value, bracket

    def recheck(self, bracket: Bracket) -> bool:
        """Re-evaluate the bracket ends: val(W(lo)) ≥ 0 and val(W(hi)) ≤ 0."""
        return self.sign(bracket.lo) >= 0 and self.sign(bracket.hi) <= 0


def approx_discounted(game: GameSpec, state: str, rewards: Optional[Rewards], disc: DiscountSpec,
                      eps: Fraction) -> Tuple[Fraction, Bracket]:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return DiscountedEngine(game, state, disc, rewards).run(eps)
