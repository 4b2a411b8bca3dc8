from dataclasses import replace
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple
from django.conf import settings
import logging
import re

from .exceptions import EnumerationCapExceeded, GameValidationError
from .models import (
    DiscountSpec,
    GameSpec,
    InducedMC,
    InducedMDP,
    MixedStationary,
    PureProfile,
)

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")
POWER = re.compile(r"^\s*2\s*\^\s*(-?\d+)\s*$")


def parse_rational(text) -> Fraction:
    """"p/q", an integer, or "2^k"; floats are refused so every number keeps an exact bit-size."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"rationals must be strings or integers, got {text!r}")
    match = RATIONAL.match(text)
    if match:
        num, den = int(match.group(1)), int(match.group(2) or 1)
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(num, den)
    match = POWER.match(text)
    if match:
        return Fraction(2) ** int(match.group(1))
    raise ValueError(f"not a rational: {text!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def validate_game(game: GameSpec) -> GameSpec:
    """
    Check every GameSpec invariant and return the game unchanged.

    Raises GameValidationError naming the first violation found, with the
    offending (state, a, b) coordinates where there are any.
    """
    if not game.states:
        raise GameValidationError("empty state set")
    if not game.actions1 or not game.actions2:
        raise GameValidationError("empty action set")
    for label, items in (("state", game.states), ("action1", game.actions1), ("action2", game.actions2)):
        if len(set(items)) != len(items):
            raise GameValidationError(f"duplicate {label} identifier")

    n = game.n
    for s in game.states:
        for a in game.actions1:
            for b in game.actions2:
                row = game.transition.get((s, a, b))
                if row is None:
                    raise GameValidationError(f"missing transition at ({s}, {a}, {b})")
                if len(row) != n:
                    raise GameValidationError(f"transition at ({s}, {a}, {b}) has {len(row)} entries, expected {n}")
                if any(p < 0 for p in row):
                    raise GameValidationError(f"negative probability at ({s}, {a}, {b})")
                total = sum(row, ZERO)
                if total != ONE:
                    raise GameValidationError(f"row sum {total} != 1 at ({s}, {a}, {b})")

                if game.rewards:
                    r = game.rewards.get((s, a, b))
                    if r is None:
                        raise GameValidationError(f"missing reward at ({s}, {a}, {b})")
                    if not ZERO <= r <= ONE:
                        raise GameValidationError(f"reward range: {r} at ({s}, {a}, {b}) is outside [0, 1]")

    if not game.rewards and game.priorities is None:
        raise GameValidationError("missing rewards: a game without priorities needs a reward for every triple")

    if game.priorities is not None:
        for s in game.states:
            if s not in game.priorities:
                raise GameValidationError(f"missing priority for state {s}")
            if game.priorities[s] < 0:
                raise GameValidationError(f"priority of {s} must be nonnegative")

    return game


def validate_discount(game: GameSpec, disc: DiscountSpec) -> DiscountSpec:
    if not disc.factors:
        raise GameValidationError("discount needs at least one factor")
    for i, lam in enumerate(disc.factors, start=1):
        if not ZERO < lam <= ONE:
            raise GameValidationError(f"discount factor {i} = {lam} is outside (0, 1]")
    for s in game.states:
        index = disc.assignment.get(s)
        if index is None:
            raise GameValidationError(f"discount assignment missing state {s}")
        if not 1 <= index <= disc.d:
            raise GameValidationError(f"discount index {index} of state {s} is outside [1, {disc.d}]")
    return disc


def validate_strategy(game: GameSpec, strat: MixedStationary) -> MixedStationary:
    if strat.player not in (1, 2):
        raise GameValidationError(f"strategy player must be 1 or 2, got {strat.player}")
    k = len(game.actions(strat.player))
    for s in game.states:
        row = strat.rows.get(s)
        if row is None:
            raise GameValidationError(f"strategy shape: no row for state {s}")
        if len(row) != k:
            raise GameValidationError(f"strategy shape: row of {s} has {len(row)} entries, expected {k}")
        if any(w < 0 for w in row) or sum(row, ZERO) != ONE:
            raise GameValidationError(f"strategy row of {s} is not a probability vector")
    return strat


def _discount_map(game: GameSpec, disc: Optional[DiscountSpec]) -> Dict[str, Fraction]:
    if disc is None:
        return {}
    return {s: disc.discount(s) for s in game.states}


def induce_mdp(game: GameSpec, strat: MixedStationary, disc: Optional[DiscountSpec] = None) -> InducedMDP:
    """Fix one player's stationary strategy and average it out, leaving the opponent's MDP."""
    validate_strategy(game, strat)
    n = game.n
    own, other = game.actions(strat.player), game.actions(3 - strat.player)
    transition = {}
    stage_reward = {}
    for s in game.states:
        weights = strat.rows[s]
        for c in other:
            vec = [ZERO] * n
            reward = ZERO
            for w, a in zip(weights, own):
                if w == 0:
                    continue
                triple = (s, a, c) if strat.player == 1 else (s, c, a)
                for t, p in enumerate(game.transition[triple]):
                    vec[t] += w * p
                reward += w * game.reward(*triple)
            transition[(s, c)] = tuple(vec)
            stage_reward[(s, c)] = reward
    return InducedMDP(
        controlling_player=3 - strat.player,
        states=game.states,
        actions=other,
        transition=transition,
        stage_reward=stage_reward,
        discount=_discount_map(game, disc),
    )


def collapse_mdp(mdp: InducedMDP, strat: MixedStationary) -> InducedMC:
    """Average the controlling player's stationary strategy into an MDP."""
    if strat.player != mdp.controlling_player:
        raise GameValidationError(f"strategy of player {strat.player} cannot control a player-{mdp.controlling_player} MDP")
    n = len(mdp.states)
    transition = {}
    stage_reward = {}
    for s in mdp.states:
        row = strat.rows.get(s)
        if row is None or len(row) != len(mdp.actions):
            raise GameValidationError(f"strategy shape: row of {s} does not match the MDP actions")
        vec = [ZERO] * n
        reward = ZERO
        for w, a in zip(row, mdp.actions):
            for t, p in enumerate(mdp.transition[(s, a)]):
                vec[t] += w * p
            reward += w * mdp.stage_reward[(s, a)]
        transition[s] = tuple(vec)
        stage_reward[s] = reward
    return InducedMC(mdp.states, transition, stage_reward, dict(mdp.discount))


def induce_mc(game: GameSpec, sigma: MixedStationary, tau: MixedStationary,
              disc: Optional[DiscountSpec] = None) -> InducedMC:
    if sigma.player != 1 or tau.player != 2:
        raise GameValidationError("induce_mc takes a player-1 and a player-2 strategy")
    validate_strategy(game, sigma)
    validate_strategy(game, tau)
    n = game.n
    transition = {}
    stage_reward = {}
    for s in game.states:
        vec = [ZERO] * n
        reward = ZERO
        for x, a in zip(sigma.rows[s], game.actions1):
            if x == 0:
                continue
            for y, b in zip(tau.rows[s], game.actions2):
                if y == 0:
                    continue
                w = x * y
                for t, p in enumerate(game.transition[(s, a, b)]):
                    vec[t] += w * p
                reward += w * game.reward(s, a, b)
        transition[s] = tuple(vec)
        stage_reward[s] = reward
    return InducedMC(game.states, transition, stage_reward, _discount_map(game, disc))


def pure_count(game: GameSpec, player: int) -> int:
    return len(game.actions(player)) ** game.n


def ensure_enumerable(game: GameSpec, player: int) -> int:
    count = pure_count(game, player)
    cap = settings.CSG_ENUMERATION_CAP
    if count > cap:
        logger.error(f"Player {player} has {count} pure stationary strategies, cap is {cap}")
        raise EnumerationCapExceeded(f"player {player} has {count} pure stationary strategies (cap {cap})")
    return count


def enumerate_pure(game: GameSpec, player: int) -> List[PureProfile]:
    """All pure stationary strategies, first state most significant, actions in declaration order."""
    actions = game.actions(player)
    return [
        PureProfile(player, tuple(zip(game.states, (actions[i] for i in combo))))
        for combo in product(range(len(actions)), repeat=game.n)
    ]


def dirac_row(actions: Sequence[str], action: str) -> Tuple[Fraction, ...]:
    return tuple(ONE if a == action else ZERO for a in actions)


def pure_to_mixed(game: GameSpec, profile: PureProfile) -> MixedStationary:
    actions = game.actions(profile.player)
    return MixedStationary(profile.player, {s: dirac_row(actions, a) for s, a in profile.choice})


def dirac_strategy(game: GameSpec, player: int, action: str) -> MixedStationary:
    actions = game.actions(player)
    return MixedStationary(player, {s: dirac_row(actions, action) for s in game.states})


def uniform_strategy(game: GameSpec, player: int) -> MixedStationary:
    k = len(game.actions(player))
    return MixedStationary(player, {s: tuple(Fraction(1, k) for _ in range(k)) for s in game.states})


def with_rewards(game: GameSpec, rewards: Dict[Tuple[str, str, str], Fraction]) -> GameSpec:
    return validate_game(replace(game, rewards=dict(rewards)))


def play_prefix_payoff(rewards: Sequence[Fraction], discounts: Sequence[Fraction]) -> Tuple[Fraction, Fraction]:
    """
    Stateful-discounted payoff of a finite play prefix.

    Args:
        rewards: stage rewards r₀, r₁, ... along the prefix
        discounts: Λ(s₀), Λ(s₁), ... of the visited states

    Returns:
        (Σᵢ rᵢ·Λ(sᵢ)·Πⱼ<ᵢ(1−Λ(sⱼ)), remaining weight Πᵢ(1−Λ(sᵢ)) left for the tail)
    """
    if len(rewards) != len(discounts):
        raise GameValidationError("prefix rewards and discounts differ in length")
    payoff = ZERO
    mass = ONE
    for r, lam in zip(rewards, discounts):
        payoff += r * lam * mass
        mass *= ONE - lam
    return payoff, mass
