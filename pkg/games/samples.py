"""
Reference games used by the fixtures, the command tests and the seeded
random corpora of the test suites.
"""
from fractions import Fraction
from random import Random
from typing import Dict, Optional, Sequence, Tuple

from .models import DiscountSpec, GameSpec, MixedStationary
from .services import validate_game

SparseRow = Dict[str, Fraction]


def make_game(states: Sequence[str], actions1: Sequence[str], actions2: Sequence[str],
              transitions: Dict[Tuple[str, str, str], SparseRow],
              rewards: Optional[Dict[Tuple[str, str, str], Fraction]] = None,
              priorities: Optional[Dict[str, int]] = None) -> GameSpec:
    """Build and validate a game from sparse transition rows (missing targets have probability 0)."""
    states = tuple(states)
    dense = {
        triple: tuple(Fraction(row.get(t, 0)) for t in states)
        for triple, row in transitions.items()
    }
    game = GameSpec(
        states=states,
        actions1=tuple(actions1),
        actions2=tuple(actions2),
        transition=dense,
        rewards={k: Fraction(v) for k, v in (rewards or {}).items()},
        priorities=dict(priorities) if priorities is not None else None,
    )
    return validate_game(game)


def single_discount(game: GameSpec, lam: Fraction) -> DiscountSpec:
    return DiscountSpec((Fraction(lam),), {s: 1 for s in game.states})


def constant_game(c: Fraction) -> GameSpec:
    return make_game(["s"], ["a"], ["b"], {("s", "a", "b"): {"s": 1}}, {("s", "a", "b"): c})


def matching_pennies() -> GameSpec:
    transitions = {("s", a, b): {"s": 1} for a in ("H", "T") for b in ("H", "T")}
    rewards = {("s", a, b): Fraction(int(a == b)) for a in ("H", "T") for b in ("H", "T")}
    return make_game(["s"], ["H", "T"], ["H", "T"], transitions, rewards)


def absorbing_game() -> GameSpec:
    """`start` pays nothing and moves to `goal`, which pays 1 forever."""
    return make_game(
        ["start", "goal"], ["a"], ["b"],
        {("start", "a", "b"): {"goal": 1}, ("goal", "a", "b"): {"goal": 1}},
        {("start", "a", "b"): 0, ("goal", "a", "b"): 1},
    )


def big_match() -> GameSpec:
    transitions = {
        ("play", "T", "L"): {"win": 1},
        ("play", "T", "R"): {"lose": 1},
        ("play", "B", "L"): {"play": 1},
        ("play", "B", "R"): {"play": 1},
    }
    rewards = {
        ("play", "T", "L"): 1,
        ("play", "T", "R"): 0,
        ("play", "B", "L"): 0,
        ("play", "B", "R"): 1,
    }
    for a in ("T", "B"):
        for b in ("L", "R"):
            transitions[("win", a, b)] = {"win": 1}
            transitions[("lose", a, b)] = {"lose": 1}
            rewards[("win", a, b)] = 1
            rewards[("lose", a, b)] = 0
    return make_game(["play", "win", "lose"], ["T", "B"], ["L", "R"], transitions, rewards)


def swap_players(game: GameSpec) -> GameSpec:
    """The same game with the players' roles exchanged and rewards complemented; every value v becomes 1 − v."""
    return validate_game(GameSpec(
        states=game.states,
        actions1=game.actions2,
        actions2=game.actions1,
        transition={(s, b, a): row for (s, a, b), row in game.transition.items()},
        rewards={(s, b, a): 1 - r for (s, a, b), r in game.rewards.items()},
        priorities=dict(game.priorities) if game.priorities is not None else None,
    ))


def parity_cycle(priorities: Sequence[int]) -> GameSpec:
    """Deterministic cycle s0 -> s1 -> ... -> s0 with the given priorities."""
    states = [f"s{i}" for i in range(len(priorities))]
    transitions = {
        (s, "a", "b"): {states[(i + 1) % len(states)]: 1}
        for i, s in enumerate(states)
    }
    return make_game(states, ["a"], ["b"], transitions, priorities=dict(zip(states, priorities)))


def _random_row(rng: Random, states: Sequence[str], max_weight: int) -> SparseRow:
    weights = [rng.randint(0, max_weight) for _ in states]
    if not any(weights):
        weights[rng.randrange(len(states))] = 1
    total = sum(weights)
    return {t: Fraction(w, total) for t, w in zip(states, weights) if w}


def random_game(rng: Random, n: int, m: int, max_weight: int = 7, reward_den: int = 15) -> GameSpec:
    """Random n-state game with m actions per player and small-denominator entries."""
    states = [f"s{i}" for i in range(n)]
    actions1 = [f"a{i}" for i in range(m)]
    actions2 = [f"b{i}" for i in range(m)]
    transitions = {}
    rewards = {}
    for s in states:
        for a in actions1:
            for b in actions2:
                transitions[(s, a, b)] = _random_row(rng, states, max_weight)
                rewards[(s, a, b)] = Fraction(rng.randint(0, reward_den), reward_den)
    return make_game(states, actions1, actions2, transitions, rewards)


def random_turn_based_parity(rng: Random, n: int, max_priority: int = 2) -> GameSpec:
    """Turn-based parity game: each state is owned by one player whose two actions pick the successor row."""
    states = [f"s{i}" for i in range(n)]
    transitions = {}
    for s in states:
        owner = rng.choice((1, 2))
        rows = [_random_row(rng, states, 2) for _ in range(2)]
        for i, a in enumerate(("a0", "a1")):
            for j, b in enumerate(("b0", "b1")):
                transitions[(s, a, b)] = rows[i] if owner == 1 else rows[j]
    priorities = {s: rng.randint(0, max_priority) for s in states}
    return make_game(states, ["a0", "a1"], ["b0", "b1"], transitions, priorities=priorities)


def random_discount(rng: Random, game: GameSpec, d: int = 1, den: int = 8) -> DiscountSpec:
    """Factors k/den with k ≥ 1, so every factor is at least 1/den."""
    factors = tuple(Fraction(rng.randint(1, den), den) for _ in range(d))
    return DiscountSpec(factors, {s: rng.randint(1, d) for s in game.states})


def random_strategy(rng: Random, game: GameSpec, player: int) -> MixedStationary:
    k = len(game.actions(player))
    rows = {}
    for s in game.states:
        weights = [rng.randint(0, 5) for _ in range(k)]
        if not any(weights):
            weights[rng.randrange(k)] = 1
        total = sum(weights)
        rows[s] = tuple(Fraction(w, total) for w in weights)
    return MixedStationary(player, rows)
