from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Tuple
from django.conf import settings
import logging

from games.models import DiscountSpec, GameSpec, InducedMC, MixedStationary, PureProfile
from games.services import (
    ensure_enumerable,
    enumerate_pure,
    induce_mc,
    validate_discount,
)
from linalg.models import RatMatrix
from linalg.services import bareiss_det, det_lower_bound, solve_linear
from matrixgames.models import MatrixGame
from matrixgames.services import game_value
from .models import KernelEntry, KernelTable, OracleResult

logger = logging.getLogger(__name__)


def system_matrix(mc: InducedMC) -> RatMatrix:
    """Id − ((1−Λ)1ᵀ)⊙P: row s is e_s − (1−Λ(s))·p(s, ·)."""
    return RatMatrix.from_rows([
        [int(i == j) - (1 - mc.discount[s]) * p for j, p in enumerate(mc.transition[s])]
        for i, s in enumerate(mc.states)
    ])


def discounted_rhs(mc: InducedMC) -> List[Fraction]:
    return [mc.discount[s] * mc.stage_reward[s] for s in mc.states]


def mc_discounted_values(mc: InducedMC) -> Dict[str, Fraction]:
    """Exact stateful-discounted value of every state of a chain (Bellman system solve)."""
    x = solve_linear(system_matrix(mc), discounted_rhs(mc))
    return dict(zip(mc.states, x))


def discounted_payoff(game: GameSpec, disc: DiscountSpec, state: str,
                      sigma: MixedStationary, tau: MixedStationary) -> Fraction:
    return mc_discounted_values(induce_mc(game, sigma, tau, disc))[state]


def _pure_mc(game: GameSpec, disc: DiscountSpec, p1: PureProfile, p2: PureProfile) -> InducedMC:
    a, b = dict(p1.choice), dict(p2.choice)
    return InducedMC(
        states=game.states,
        transition={s: game.transition[(s, a[s], b[s])] for s in game.states},
        stage_reward={s: game.reward(s, a[s], b[s]) for s in game.states},
        discount={s: disc.discount(s) for s in game.states},
    )


def _entry_from_mc(mc: InducedMC, state: str) -> KernelEntry:
    system = system_matrix(mc)
    nabla = bareiss_det(system)
    nabla_s = bareiss_det(system.with_column(mc.states.index(state), discounted_rhs(mc)))
    floor_bound = min(mc.discount.values()) ** len(mc.states)
    if nabla < floor_bound:
        raise ArithmeticError(f"∇ = {nabla} is below (min λ)^n = {floor_bound}")
    return KernelEntry(nabla_s=nabla_s, nabla=nabla)


def kernel_entry(game: GameSpec, disc: DiscountSpec, state: str, p1: PureProfile, p2: PureProfile) -> KernelEntry:
    return _entry_from_mc(_pure_mc(game, disc, p1, p2), state)


def build_kernel(game: GameSpec, disc: DiscountSpec, state: str) -> KernelTable:
    validate_discount(game, disc)
    ensure_enumerable(game, 1)
    ensure_enumerable(game, 2)
    rows = enumerate_pure(game, 1)
    cols = enumerate_pure(game, 2)
    entries = tuple(
        tuple(kernel_entry(game, disc, state, p1, p2) for p2 in cols)
        for p1 in rows
    )
    logger.info(f"Built {len(rows)}x{len(cols)} kernel table for state {state}")
    return KernelTable(state, tuple(rows), tuple(cols), entries)


def build_w(game: GameSpec, disc: DiscountSpec, state: str, z: Fraction) -> MatrixGame:
    return build_kernel(game, disc, state).at(z)


def lift_strategy(game: GameSpec, strat: MixedStationary) -> List[Tuple[PureProfile, Fraction]]:
    """Product distribution of a stationary strategy over pure profiles, in enumerate_pure order."""
    actions = game.actions(strat.player)
    lifted = []
    for profile in enumerate_pure(game, strat.player):
        weight = Fraction(1)
        for s, a in profile.choice:
            weight *= strat.rows[s][actions.index(a)]
        lifted.append((profile, weight))
    return lifted


def mixed_kernel_entry(table: KernelTable, game: GameSpec,
                       sigma: MixedStationary, tau: MixedStationary) -> KernelEntry:
    """
    ∇ and ∇^s of a mixed profile pair as lifted averages of the pure entries.

    Each row of the system matrix is affine in the state's action weights,
    so both determinants are multilinear in the lifted weights.
    """
    x = [w for _, w in lift_strategy(game, sigma)]
    y = [w for _, w in lift_strategy(game, tau)]
    nabla_s = Fraction(0)
    nabla = Fraction(0)
    for i, row in enumerate(table.entries):
        if x[i] == 0:
            continue
        for j, entry in enumerate(row):
            w = x[i] * y[j]
            nabla_s += w * entry.nabla_s
            nabla += w * entry.nabla
    return KernelEntry(nabla_s=nabla_s, nabla=nabla)


def stage_matrix(game: GameSpec, disc: DiscountSpec, state: str, values: Dict[str, Fraction]) -> MatrixGame:
    """One-shot game Λ(s)·r(s,a,b) + (1−Λ(s))·Σₜ p(s,a,b)(t)·v(t)."""
    lam = disc.discount(state)
    v = [values[t] for t in game.states]
    return MatrixGame.from_rows([
        [
            lam * game.reward(state, a, b)
            + (1 - lam) * sum((p * x for p, x in zip(game.transition[(state, a, b)], v)), Fraction(0))
            for b in game.actions2
        ]
        for a in game.actions1
    ])


def _round_down(x: Fraction, grid_bits: int) -> Fraction:
    scale = 1 << grid_bits
    return Fraction(floor(x * scale), scale)


def value_iteration(game: GameSpec, disc: DiscountSpec, tol: Fraction) -> OracleResult:
    """
    Shapley value iteration from v₀ = 0 with certified stopping.

    Stops once ‖Tv − v‖ ≤ tol·min λ; then the value lies within
    (1 − min λ)·‖Tv − v‖ / min λ of Tv. Iterates are rounded down to a
    dyadic grid between steps to keep their size bounded; the certificate
    only uses the last exact step, so the rounding does not weaken it.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    validate_discount(game, disc)
    lam_min = min(disc.discount(s) for s in game.states)
    grid_bits = ceil(Fraction(2) / (tol * lam_min * lam_min)).bit_length() + 2
    cap = settings.CSG_ORACLE_MAX_ITERATIONS

    v = {s: Fraction(0) for s in game.states}
    for iteration in range(1, cap + 1):
        solutions = {s: game_value(stage_matrix(game, disc, s, v)) for s in game.states}
        u = {s: sol.value for s, sol in solutions.items()}
        step = max(abs(u[s] - v[s]) for s in game.states)
        if step <= tol * lam_min:
            radius = (1 - lam_min) * step / lam_min
            intervals = {s: (max(Fraction(0), u[s] - radius), min(Fraction(1), u[s] + radius)) for s in game.states}
            logger.info(f"Value iteration converged in {iteration} iterations (step {float(step):.3e})")
            return OracleResult(
                intervals=intervals,
                values=u,
                sigma=MixedStationary(1, {s: sol.row_strategy for s, sol in solutions.items()}),
                tau=MixedStationary(2, {s: sol.col_strategy for s, sol in solutions.items()}),
                iterations=iteration,
            )
        v = {s: _round_down(x, grid_bits) for s, x in u.items()}

    logger.error(f"Value iteration did not converge within {cap} iterations")
    raise RuntimeError(f"value iteration exceeded {cap} iterations")


def value_iteration_oracle(game: GameSpec, disc: DiscountSpec, tol: Fraction) -> Dict[str, Tuple[Fraction, Fraction]]:
    return value_iteration(game, disc, tol).intervals


def det_lower_bound_check(mc: InducedMC) -> bool:
    """det(Id − ((1−Λ)1ᵀ)⊙P) ≥ (min λ)^n for the chain."""
    p = RatMatrix.from_rows([list(mc.transition[s]) for s in mc.states])
    det, bound = det_lower_bound(p, [mc.discount[s] for s in mc.states])
    return det >= bound
