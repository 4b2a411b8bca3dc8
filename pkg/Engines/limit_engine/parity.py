from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple
from django.conf import settings
import logging

from games.exceptions import GameValidationError
from games.models import GameSpec, InducedMC
from games.services import ensure_enumerable, enumerate_pure, induce_mc, pure_to_mixed, validate_game
from linalg.models import RatMatrix
from linalg.services import solve_linear
from .engine import Rewards, approx_limit, approx_limit_ladder

logger = logging.getLogger(__name__)

ORDERINGS = ("outermost", "innermost")


def parity_to_limit(game: GameSpec, ordering: Optional[str] = None) -> Tuple[Rewards, Dict[str, int]]:
    """
    Rewards and discount assignment whose limit value is the parity value.

    Stopping in a state pays 1 iff its priority is even. Distinct
    priorities are ranked; with the 'outermost' ordering the smallest
    (most important) priority gets index 1, whose factor vanishes last.
    Ranking keeps the order of priority(s) + 1 and only drops the indices
    no state uses, so d is the number of distinct priorities.
    """
    ordering = ordering or settings.CSG_PARITY_ORDERING
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown parity ordering {ordering!r}, expected one of {ORDERINGS}")
    if game.priorities is None:
        raise GameValidationError("parity instance needs priorities")
    for s in game.states:
        if s not in game.priorities:
            raise GameValidationError(f"missing priority for state {s}")
        if game.priorities[s] < 0:
            raise GameValidationError(f"priority of {s} out of range: {game.priorities[s]}")

    levels = sorted({game.priorities[s] for s in game.states})
    d = len(levels)
    rank = {p: i for i, p in enumerate(levels)}
    if ordering == "outermost":
        chi = {s: rank[game.priorities[s]] + 1 for s in game.states}
    else:
        chi = {s: d - rank[game.priorities[s]] for s in game.states}

    rewards = {
        (s, a, b): Fraction(int(game.priorities[s] % 2 == 0))
        for s in game.states for a in game.actions1 for b in game.actions2
    }
    return rewards, chi


def approx_parity(game: GameSpec, state: str, eps: Fraction, mode: str = "exact",
                  ladder: Optional[Sequence[Fraction]] = None, ordering: Optional[str] = None) -> Fraction:
    rewards, chi = parity_to_limit(validate_game(game), ordering)
    if mode == "exact":
        return approx_limit(game, state, rewards, chi, eps)
    if mode == "ladder":
        return approx_limit_ladder(game, state, rewards, chi, eps, ladder).estimate
    raise ValueError(f"unknown mode {mode!r}")


def _successors(mc: InducedMC) -> Dict[str, Set[str]]:
    return {s: {t for t, p in zip(mc.states, mc.transition[s]) if p > 0} for s in mc.states}


def _reachable(succ: Dict[str, Set[str]], start: str) -> Set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for t in succ[stack.pop()]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def mc_parity_probability(mc: InducedMC, priorities: Dict[str, int]) -> Dict[str, Fraction]:
    """
    Probability that the minimal priority seen infinitely often is even, from every state.

    A state lies in a bottom class when everything it reaches reaches it
    back; the chain ends up in some bottom class with probability 1 and
    then visits all of its states infinitely often.
    """
    succ = _successors(mc)
    reach = {s: _reachable(succ, s) for s in mc.states}
    bottom = {s for s in mc.states if all(s in reach[t] for t in reach[s])}
    winning = {s for s in bottom if min(priorities[t] for t in reach[s]) % 2 == 0}

    transient = [s for s in mc.states if s not in bottom]
    result = {s: Fraction(int(s in winning)) for s in bottom}
    if transient:
        index = {s: i for i, s in enumerate(transient)}
        rows = []
        rhs = []
        for s in transient:
            row = [Fraction(int(s == t)) for t in transient]
            gain = Fraction(0)
            for t, p in zip(mc.states, mc.transition[s]):
                if t in index:
                    row[index[t]] -= p
                elif t in winning:
                    gain += p
            rows.append(row)
            rhs.append(gain)
        result.update(zip(transient, solve_linear(RatMatrix.from_rows(rows), rhs)))
    return result


def is_turn_based(game: GameSpec) -> bool:
    """Every state's transitions ignore one of the two players' actions."""
    for s in game.states:
        p1_only = all(
            game.transition[(s, a, b)] == game.transition[(s, a, game.actions2[0])]
            for a in game.actions1 for b in game.actions2
        )
        p2_only = all(
            game.transition[(s, a, b)] == game.transition[(s, game.actions1[0], b)]
            for a in game.actions1 for b in game.actions2
        )
        if not (p1_only or p2_only):
            return False
    return True


def turn_based_parity_value(game: GameSpec) -> Dict[str, Fraction]:
    """
    Parity value of a turn-based game by enumerating both players' pure stationary strategies.

    Pure stationary strategies are optimal in turn-based stochastic parity
    games, so value(s) = max over σ of min over τ of the chain's winning probability.
    """
    validate_game(game)
    if game.priorities is None:
        raise GameValidationError("parity instance needs priorities")
    if not is_turn_based(game):
        raise GameValidationError("strategy enumeration oracle needs a turn-based game")
    ensure_enumerable(game, 1)
    ensure_enumerable(game, 2)
    sigmas = [pure_to_mixed(game, p) for p in enumerate_pure(game, 1)]
    taus = [pure_to_mixed(game, p) for p in enumerate_pure(game, 2)]
    best = {s: Fraction(0) for s in game.states}
    for sigma in sigmas:
        worst = {s: Fraction(1) for s in game.states}
        for tau in taus:
            probs = mc_parity_probability(induce_mc(game, sigma, tau), game.priorities)
            worst = {s: min(worst[s], probs[s]) for s in game.states}
        best = {s: max(best[s], worst[s]) for s in game.states}
    logger.debug(f"Enumerated {len(sigmas)}x{len(taus)} pure profile pairs")
    return best
