from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Dict, Optional, Sequence, Tuple
from django.conf import settings
import logging

from games.models import DiscountSpec, GameSpec
from games.services import parse_rational, validate_game, with_rewards
from linalg.services import bit_size
from Engines.discounted_engine.engine import Bracket, Rewards, approx_discounted
from .exceptions import ExactModeCapExceeded

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LimitConstants:
    """
    Discount factors small enough that the discounted value is within eps/2 of the limit value.

    λ⁰₁ = 2^(−B1) and each further factor is the previous one to the power nD+1.
    """
    D: int
    B1: int
    lambdas: Tuple[Fraction, ...]
    kappa: int
    eps: Fraction
    bit_size: int


@dataclass(frozen=True)
class ExactLimitResult:
    value: Fraction
    bracket: Bracket
    constants: LimitConstants


@dataclass(frozen=True)
class LadderPoint:
    lam: Fraction
    value: Fraction
    bracket: Bracket


@dataclass(frozen=True)
class LadderResult:
    points: Tuple[LadderPoint, ...]
    estimate: Fraction


def round_eps(eps: Fraction) -> Tuple[int, Fraction]:
    """Largest 2^(−κ) ≤ eps with κ ≥ 1."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    kappa = max(1, (ceil(1 / Fraction(eps)) - 1).bit_length())
    return kappa, Fraction(1, 1 << kappa)


def game_bit_size(game: GameSpec) -> int:
    """B: largest bit(numerator) + bit(denominator) over transition probabilities and rewards."""
    sizes = [bit_size(Fraction(p)) for row in game.transition.values() for p in row]
    sizes.extend(bit_size(Fraction(r)) for r in game.rewards.values())
    return max(sizes)


def compute_limit_constants(n: int, m: int, d: int, bits: int, eps: Fraction) -> LimitConstants:
    kappa, eps2 = round_eps(eps)
    D = m ** n
    # bit(ε) for ε = 2^(−κ) counts the κ fractional bits
    B1 = 11 * D * n * (bits + bit_size(n) + bit_size(D) + kappa)
    lambdas = tuple(Fraction(1, 1 << (B1 * (n * D + 1) ** (i - 1))) for i in range(1, d + 1))
    return LimitConstants(D=D, B1=B1, lambdas=lambdas, kappa=kappa, eps=eps2, bit_size=bits)


def factor_count(chi: Dict[str, int]) -> int:
    if not chi or min(chi.values()) < 1:
        raise ValueError("assignment must map every state to an index ≥ 1")
    return max(chi.values())


def limit_constants(game: GameSpec, chi: Dict[str, int], eps: Fraction, bits: Optional[int] = None) -> LimitConstants:
    if bits is None:
        bits = game_bit_size(game)
    return compute_limit_constants(game.n, game.m, factor_count(chi), bits, eps)


def check_exact_cap(game: GameSpec, chi: Dict[str, int]):
    n, m, d = game.n, game.m, factor_count(chi)
    caps = (settings.CSG_EXACT_MAX_STATES, settings.CSG_EXACT_MAX_ACTIONS, settings.CSG_EXACT_MAX_FACTORS)
    if n > caps[0] or m > caps[1] or d > caps[2]:
        message = (f"exact mode supports n ≤ {caps[0]}, m ≤ {caps[1]}, d ≤ {caps[2]}; "
                   f"got n={n}, m={m}, d={d} (use --mode ladder)")
        logger.error(message)
        raise ExactModeCapExceeded(message)


def solve_limit_exact(game: GameSpec, state: str, rewards: Optional[Rewards], chi: Dict[str, int],
                      eps: Fraction, bits: Optional[int] = None) -> ExactLimitResult:
    """Bisection at the limit constants' factors; the bracket is the discounted one at those factors."""
    game = with_rewards(game, rewards) if rewards is not None else validate_game(game)
    check_exact_cap(game, chi)
    constants = limit_constants(game, chi, eps, bits)
    logger.info(f"Exact limit solve at {state}: D={constants.D}, B1={constants.B1}, "
                f"d={len(constants.lambdas)}, eps rounded to 2^-{constants.kappa}")
    disc = DiscountSpec(constants.lambdas, dict(chi))
    value, bracket = approx_discounted(game, state, None, disc, constants.eps / 2)
    return ExactLimitResult(value, bracket, constants)


def approx_limit(game: GameSpec, state: str, rewards: Optional[Rewards], chi: Dict[str, int],
                 eps: Fraction, bits: Optional[int] = None) -> Fraction:
    return solve_limit_exact(game, state, rewards, chi, eps, bits).value


def ladder_discount(t: Fraction, chi: Dict[str, int]) -> DiscountSpec:
    """Factor i is t^i, so inner factors vanish faster than outer ones."""
    d = factor_count(chi)
    return DiscountSpec(tuple(t ** i for i in range(1, d + 1)), dict(chi))


def default_ladder() -> Tuple[Fraction, ...]:
    return tuple(parse_rational(part) for part in settings.CSG_DEFAULT_LADDER.split(',') if part.strip())


def validate_ladder(ladder: Optional[Sequence[Fraction]]) -> Tuple[Fraction, ...]:
    """None falls back to CSG_DEFAULT_LADDER."""
    if ladder is None:
        ladder = default_ladder()
    ladder = tuple(Fraction(t) for t in ladder)
    if not ladder:
        raise ValueError("ladder is empty")
    if any(not 0 < t <= 1 for t in ladder):
        raise ValueError("ladder entries must lie in (0, 1]")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly decreasing")
    return ladder


def richardson(points: Sequence[Tuple[Fraction, Fraction]]) -> Fraction:
    """Extrapolate v(λ) ≈ v₀ + c·λ to λ = 0 from the two smallest ladder points, clamped to [0, 1]."""
    if len(points) == 1:
        return points[0][1]
    (ta, va), (tb, vb) = points[-2], points[-1]
    estimate = (ta * vb - tb * va) / (ta - tb)
    return min(Fraction(1), max(Fraction(0), estimate))


def approx_limit_ladder(game: GameSpec, state: str, rewards: Optional[Rewards], chi: Dict[str, int],
                        eps: Fraction, ladder: Optional[Sequence[Fraction]] = None) -> LadderResult:
    """Heuristic limit estimate from bisection solves over a decreasing λ ladder."""
    ladder = validate_ladder(ladder)
    game = with_rewards(game, rewards) if rewards is not None else validate_game(game)
    logger.warning(f"Ladder mode is heuristic: {len(ladder)} points down to λ={ladder[-1]}")
    points = []
    for t in ladder:
        value, bracket = approx_discounted(game, state, None, ladder_discount(t, chi), eps / 2)
        points.append(LadderPoint(t, value, bracket))
    estimate = richardson([(p.lam, p.value) for p in points])
    logger.info(f"Ladder estimate at {state}: {estimate}")
    return LadderResult(tuple(points), estimate)
