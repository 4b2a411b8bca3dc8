from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

# (state, action of player 1, action of player 2)
Triple = Tuple[str, str, str]


@dataclass(frozen=True)
class GameSpec:
    """
    Finite two-player zero-sum concurrent stochastic game.

    Transitions are probability vectors over `states` in declaration order.
    Rewards may be empty for parity instances, which carry priorities instead.
    """
    states: Tuple[str, ...]
    actions1: Tuple[str, ...]
    actions2: Tuple[str, ...]
    transition: Dict[Triple, Tuple[Fraction, ...]]
    rewards: Dict[Triple, Fraction] = field(default_factory=dict)
    priorities: Optional[Dict[str, int]] = None

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def m(self) -> int:
        return max(len(self.actions1), len(self.actions2))

    def actions(self, player: int) -> Tuple[str, ...]:
        return self.actions1 if player == 1 else self.actions2

    def index(self, state: str) -> int:
        return self.states.index(state)

    def reward(self, state: str, a: str, b: str) -> Fraction:
        # Parity instances have no rewards; their induced chains pay 0
        if not self.rewards:
            return Fraction(0)
        return self.rewards[(state, a, b)]


@dataclass(frozen=True)
class DiscountSpec:
    """Discount factors λ₁..λ_d and the assignment χ of states to 1-based factor indices."""
    factors: Tuple[Fraction, ...]
    assignment: Dict[str, int]

    @property
    def d(self) -> int:
        return len(self.factors)

    def discount(self, state: str) -> Fraction:
        return self.factors[self.assignment[state] - 1]

    def vector(self, states: Tuple[str, ...]) -> List[Fraction]:
        return [self.discount(s) for s in states]


@dataclass(frozen=True)
class MixedStationary:
    """Randomized stationary strategy; rows are indexed like the player's action list."""
    player: int
    rows: Dict[str, Tuple[Fraction, ...]]


@dataclass(frozen=True)
class PureProfile:
    """Pure stationary strategy: one action per state."""
    player: int
    choice: Tuple[Tuple[str, str], ...]

    def action(self, state: str) -> str:
        return dict(self.choice)[state]

    @property
    def key(self) -> Tuple[str, ...]:
        return tuple(action for _, action in self.choice)


@dataclass(frozen=True)
class InducedMC:
    states: Tuple[str, ...]
    transition: Dict[str, Tuple[Fraction, ...]]
    stage_reward: Dict[str, Fraction]
    discount: Dict[str, Fraction]


@dataclass(frozen=True)
class InducedMDP:
    """One-player game left over once the other player's strategy is fixed."""
    controlling_player: int
    states: Tuple[str, ...]
    actions: Tuple[str, ...]
    transition: Dict[Tuple[str, str], Tuple[Fraction, ...]]
    stage_reward: Dict[Tuple[str, str], Fraction]
    discount: Dict[str, Fraction]
