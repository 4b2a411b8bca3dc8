from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping
from django.conf import settings
import logging

from games.exceptions import EnumerationCapExceeded, GameValidationError
from games.models import DiscountSpec, GameSpec, InducedMC, InducedMDP, MixedStationary, PureProfile
from games.services import induce_mdp, validate_discount, validate_strategy
from kernel.services import mc_discounted_values
from linalg.exceptions import ShapeError
from .exceptions import CertificateError
from .models import BestResponse, CertificateCheck, ValueCertificate

logger = logging.getLogger(__name__)


def _pure_chain(mdp: InducedMDP, profile: PureProfile) -> InducedMC:
    return InducedMC(
        mdp.states,
        {s: mdp.transition[(s, profile.action(s))] for s in mdp.states},
        {s: mdp.stage_reward[(s, profile.action(s))] for s in mdp.states},
        dict(mdp.discount),
    )


def enumerate_mdp_strategies(mdp: InducedMDP) -> List[PureProfile]:
    count = len(mdp.actions) ** len(mdp.states)
    cap = settings.CSG_ENUMERATION_CAP
    if count > cap:
        logger.error(f"MDP has {count} pure stationary strategies, cap is {cap}")
        raise EnumerationCapExceeded(f"MDP has {count} pure stationary strategies (cap {cap})")
    return [
        PureProfile(mdp.controlling_player, tuple(zip(mdp.states, combo)))
        for combo in product(mdp.actions, repeat=len(mdp.states))
    ]


def bellman_image(mdp: InducedMDP, values: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    """One application of the MDP Bellman operator; the controlling player maximizes iff it is player 1."""
    pick = max if mdp.controlling_player == 1 else min
    image = {}
    for s in mdp.states:
        lam = mdp.discount[s]
        image[s] = pick(
            lam * mdp.stage_reward[(s, a)]
            + (1 - lam) * sum((p * values[t] for p, t in zip(mdp.transition[(s, a)], mdp.states)), Fraction(0))
            for a in mdp.actions
        )
    return image


def bellman_residual(mdp: InducedMDP, values: Mapping[str, Fraction]) -> Fraction:
    image = bellman_image(mdp, values)
    return max(abs(image[s] - values[s]) for s in mdp.states)


def best_response(mdp: InducedMDP) -> BestResponse:
    """
    Optimal values of the controlling player by enumerating pure stationary strategies.

    Some pure stationary strategy is optimal from every state at once, so
    the statewise optimum is attained by a single enumerated profile; the
    result is cross-checked against the Bellman equation.
    """
    if not mdp.discount:
        raise GameValidationError("best response needs a discounted MDP")
    better = (lambda a, b: a > b) if mdp.controlling_player == 1 else (lambda a, b: a < b)
    best_profile, best_values = None, None
    for profile in enumerate_mdp_strategies(mdp):
        values = mc_discounted_values(_pure_chain(mdp, profile))
        if best_values is None or better(sum(values.values()), sum(best_values.values())):
            best_profile, best_values = profile, values

    if bellman_residual(mdp, best_values) != 0:
        raise ArithmeticError("best response value is not a Bellman fixed point")
    logger.debug(f"Best response of player {mdp.controlling_player}: {best_profile.key}")
    return BestResponse(best_values, best_profile)


def best_response_value(mdp: InducedMDP, state: str) -> Fraction:
    if state not in mdp.states:
        raise ValueError(f"unknown state {state}")
    return best_response(mdp).values[state]


def check_eps_optimal(game: GameSpec, disc: DiscountSpec, strat: MixedStationary, eps: Fraction,
                      value_ref: Mapping[str, Fraction]) -> bool:
    """
    Whether strat guarantees value_ref within eps against every opponent.

    Only the states present in value_ref are checked.
    """
    validate_discount(game, disc)
    reply = best_response(induce_mdp(game, strat, disc)).values
    if strat.player == 1:
        return all(reply[s] >= ref - eps for s, ref in value_ref.items())
    return all(reply[s] <= ref + eps for s, ref in value_ref.items())


def evaluate_certificate(game: GameSpec, disc: DiscountSpec, state: str, cert: ValueCertificate,
                         eps: Fraction) -> CertificateCheck:
    """
    Both sides of the certificate check at `state`.

    v_σ is the opponent's best response to σ, v_τ player 1's best response
    to τ. Acceptance means α − 3ε/4 ≤ v_σ − ε/4 and α + 3ε/4 ≥ v_τ + ε/4,
    which places α within ε/2 of the value.
    """
    if eps != cert.eps:
        raise CertificateError(f"eps {eps} does not match the certificate's 2^-{cert.kappa}")
    if cert.sigma.player != 1 or cert.tau.player != 2:
        raise CertificateError("certificate needs a player-1 sigma and a player-2 tau")
    if state not in game.states:
        raise CertificateError(f"unknown state {state}")
    try:
        validate_strategy(game, cert.sigma)
        validate_strategy(game, cert.tau)
    except GameValidationError as exc:
        raise CertificateError(str(exc)) from exc
    validate_discount(game, disc)

    v_sigma = best_response(induce_mdp(game, cert.sigma, disc)).values[state]
    v_tau = best_response(induce_mdp(game, cert.tau, disc)).values[state]
    check = CertificateCheck.build(cert.alpha, eps, v_sigma, v_tau)
    logger.info(f"Certificate at {state}: alpha={check.alpha} v_sigma={v_sigma} v_tau={v_tau} "
                f"{'accepted' if check.accepted else 'rejected'}")
    return check


def verify_certificate(game: GameSpec, disc: DiscountSpec, state: str, cert: ValueCertificate,
                       eps: Fraction) -> bool:
    return evaluate_certificate(game, disc, state, cert, eps).accepted


def mdp_continuity_gap(first: InducedMDP, second: InducedMDP) -> Fraction:
    """max over (s, a) of ‖p(s, a) − p̃(s, a)‖₁ divided by min Λ; bounds the value gap of the two MDPs."""
    if (first.states, first.actions, first.controlling_player) != \
            (second.states, second.actions, second.controlling_player):
        raise ShapeError("MDPs differ in states, actions or controlling player")
    if first.discount != second.discount or first.stage_reward != second.stage_reward:
        raise ShapeError("MDPs differ in discounts or rewards")
    norm = max(
        sum((abs(p - q) for p, q in zip(first.transition[key], second.transition[key])), Fraction(0))
        for key in first.transition
    )
    return norm / min(first.discount.values())


def patience(strat: MixedStationary) -> Fraction:
    """Smallest positive probability the strategy uses."""
    return min(p for row in strat.rows.values() for p in row if p > 0)


def patience_threshold(disc: DiscountSpec, game: GameSpec, eps: Fraction) -> Fraction:
    return min(disc.discount(s) for s in game.states) * eps / 2


def prune_strategy(strat: MixedStationary, threshold: Fraction) -> MixedStationary:
    """Zero every weight ≤ threshold and renormalize each row exactly."""
    rows = {}
    for s, row in strat.rows.items():
        kept = [p if p > threshold else Fraction(0) for p in row]
        total = sum(kept, Fraction(0))
        if total == 0:
            raise ValueError(f"pruning at {threshold} removes every action of {s}")
        rows[s] = tuple(p / total for p in kept)
    return MixedStationary(strat.player, rows)
