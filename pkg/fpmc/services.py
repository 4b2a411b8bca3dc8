from fractions import Fraction
from functools import reduce
from typing import Dict, List, Sequence
import logging

from games.models import InducedMC
from linalg.models import RatMatrix
from linalg.services import solve_linear
from .exceptions import ChainNotAbsorbingError, FpArithmeticError
from .models import BOT, TOP, FpDistribution, FpNumber, ReachMC

logger = logging.getLogger(__name__)

ONE = Fraction(1)


def _floor_log2(x: Fraction) -> int:
    num, den = x.numerator, x.denominator
    t = num.bit_length() - den.bit_length()
    if (num < den << t) if t >= 0 else (num << -t < den):
        t -= 1
    return t


def truncate(x: Fraction, ell: int) -> FpNumber:
    """Largest element of 𝓕(ℓ) not above x (round toward zero)."""
    if ell < 1:
        raise FpArithmeticError(f"precision must be positive, got {ell}")
    x = Fraction(x)
    if x < 0:
        raise FpArithmeticError(f"negative result {x}")
    if x == 0:
        return FpNumber(0, 0, ell)
    e = _floor_log2(x) - (ell - 1)
    if e >= 0:
        mantissa = x.numerator // (x.denominator << e)
    else:
        mantissa = (x.numerator << -e) // x.denominator
    shift = (mantissa & -mantissa).bit_length() - 1
    return FpNumber(mantissa >> shift, e + shift, ell)


def is_representable(x: Fraction, ell: int) -> bool:
    return truncate(x, ell).value == x


def _same_precision(a: FpNumber, b: FpNumber) -> int:
    if a.ell != b.ell:
        raise FpArithmeticError(f"precision mismatch: {a.ell} vs {b.ell}")
    return a.ell


def fp_add(a: FpNumber, b: FpNumber) -> FpNumber:
    return truncate(a.value + b.value, _same_precision(a, b))


def fp_sub(a: FpNumber, b: FpNumber) -> FpNumber:
    ell = _same_precision(a, b)
    if a.value < b.value:
        raise FpArithmeticError(f"negative result {a} - {b}")
    return truncate(a.value - b.value, ell)


def fp_mul(a: FpNumber, b: FpNumber) -> FpNumber:
    return truncate(a.value * b.value, _same_precision(a, b))


def fp_div(a: FpNumber, b: FpNumber) -> FpNumber:
    ell = _same_precision(a, b)
    if b.is_zero:
        raise FpArithmeticError(f"division by zero: {a} / {b}")
    return truncate(a.value / b.value, ell)


def fp_sum(xs: Sequence[FpNumber]) -> FpNumber:
    """Left fold of ⊕."""
    return reduce(fp_add, xs)


def rel_distance(x: Fraction, y: Fraction) -> Fraction:
    """rel(x, y) = max(x/y, y/x) − 1."""
    x, y = Fraction(x), Fraction(y)
    if x <= 0 or y <= 0:
        raise FpArithmeticError(f"relative distance needs positive inputs, got {x} and {y}")
    return max(x / y, y / x) - 1


def closeness_bound(ell: int, i: int) -> Fraction:
    """(1 − 2^(1−ℓ))^(−i) − 1."""
    if ell < 1 or i < 0:
        raise ValueError(f"closeness needs ell ≥ 1 and i ≥ 0, got ell={ell}, i={i}")
    if i == 0:
        return Fraction(0)
    if ell == 1:
        raise FpArithmeticError("closeness bound is unbounded for ell = 1")
    return (1 - Fraction(2, 1 << ell)) ** -i - 1


def is_close(x: Fraction, y: Fraction, ell: int, i: int) -> bool:
    """(ℓ, i)-closeness of two nonnegative numbers; zero is only close to zero."""
    if x == y:
        return True
    if x <= 0 or y <= 0:
        return False
    if ell == 1:
        return i > 0
    return rel_distance(x, y) <= closeness_bound(ell, i)


def closeness_index(x: Fraction, y: Fraction, ell: int, limit: int = 10 ** 6) -> int:
    """Smallest i such that x and y are (ℓ, i)-close."""
    for i in range(limit + 1):
        if is_close(x, y, ell, i):
            return i
    raise FpArithmeticError(f"{x} and {y} are not ({ell}, {limit})-close")


def distributions_close(mu: Sequence[Fraction], nu: Sequence[Fraction], ell: int, i: int) -> bool:
    return len(mu) == len(nu) and all(is_close(a, b, ell, i) for a, b in zip(mu, nu))


def normalize_to_fp_distribution(xs: Sequence[FpNumber]) -> FpDistribution:
    """
    μ(i) = xᵢ ⊘ (⊕ⱼ xⱼ), returned as a 𝓓(ℓ) distribution with weights μ(i).

    The weights sum to within (ℓ, t) of 1 and the resulting distribution is
    (ℓ, 2t)-close to the exact normalization of xs; both are re-checked.
    """
    if not xs:
        raise FpArithmeticError("cannot normalize an empty list")
    ell = xs[0].ell
    for x in xs:
        _same_precision(xs[0], x)
    if all(x.is_zero for x in xs):
        raise FpArithmeticError("cannot normalize all-zero weights")
    t = len(xs)
    total = fp_sum(xs)
    dist = FpDistribution(tuple(fp_div(x, total) for x in xs), ell)

    exact_total = sum((x.value for x in xs), Fraction(0))
    exact = [x.value / exact_total for x in xs]
    if not is_close(dist.total, ONE, ell, t) or not distributions_close(dist.probabilities, exact, ell, 2 * t):
        raise ArithmeticError(f"normalized distribution violates its ({ell}, {2 * t}) closeness bound")
    return dist


def fp_distribution_from_exact(mu: Sequence[Fraction], ell: int) -> FpDistribution:
    """Truncated weights of an exact distribution; (ℓ, 2)-close to mu, well inside (ℓ, 2t+2)."""
    mu = [Fraction(p) for p in mu]
    if any(p < 0 for p in mu) or sum(mu) != 1:
        raise FpArithmeticError("input is not a probability distribution")
    dist = FpDistribution(tuple(truncate(p, ell) for p in mu), ell)
    t = len(mu)
    if not is_close(dist.total, ONE, ell, t) or not distributions_close(dist.probabilities, mu, ell, 2 * t + 2):
        raise ArithmeticError(f"rounded distribution violates its ({ell}, {2 * t + 2}) closeness bound")
    return dist


def mc_discounted_to_reachability(mc: InducedMC) -> ReachMC:
    """
    Chain with two extra absorbing states whose reachability value of TOP is the discounted value.

    From s: move on with (1−Λ(s))·p(s, ·), stop into TOP with Λ(s)·r(s),
    stop into BOT with Λ(s)·(1−r(s)).
    """
    for s in mc.states:
        if mc.discount[s] <= 0:
            raise ValueError(f"discount of {s} must be positive for the reachability reduction")
        if not 0 <= mc.stage_reward[s] <= 1:
            raise ValueError(f"reward of {s} out of range: {mc.stage_reward[s]}")
    states = tuple(mc.states) + (TOP, BOT)
    transition = {}
    for s in mc.states:
        lam, r = mc.discount[s], mc.stage_reward[s]
        row = mc.transition[s]
        mass = sum(row, Fraction(0))
        transition[s] = tuple((1 - lam) * p for p in row) + (lam * r * mass, lam * (1 - r) * mass)
    transition[TOP] = tuple(ONE if t == TOP else Fraction(0) for t in states)
    transition[BOT] = tuple(ONE if t == BOT else Fraction(0) for t in states)
    return ReachMC(states, transition, source=mc)


def _rounded_source_row(mc: InducedMC, s: str, ell: int) -> List[FpNumber]:
    lam = truncate(mc.discount[s], ell)
    r = truncate(mc.stage_reward[s], ell)
    one = truncate(ONE, ell)
    row = [truncate(p, ell) for p in mc.transition[s]]
    if (lam.value, r.value) != (mc.discount[s], mc.stage_reward[s]) or \
            any(q.value != p for q, p in zip(row, mc.transition[s])):
        raise FpArithmeticError(f"chain inputs at {s} are not in F({ell})")
    stay = fp_sub(one, lam)
    to_top = fp_sum([fp_mul(fp_mul(lam, r), p) for p in row])
    to_bot = fp_sum([fp_mul(fp_mul(lam, fp_sub(one, r)), p) for p in row])
    return [fp_mul(stay, p) for p in row] + [to_top, to_bot]


def fp_round_chain(reach: ReachMC, ell: int, strict: bool = True) -> ReachMC:
    """
    Redo the reduction with truncating operations and normalize every row into 𝓓(ℓ).

    Every entry of the result is (ℓ, n+3)-close to the exact chain, where
    n counts the transient states: the stop-into-BOT entry takes n+2
    truncations and the exact renormalization one more. For n ≥ 2 and
    ℓ ≥ 6 that puts every entry within 6n·2^(−ℓ) in relative distance.
    strict enforces ℓ ≥ 1000n².
    """
    n = len(reach.transient)
    if strict and ell < 1000 * n * n:
        raise FpArithmeticError(f"precision {ell} below 1000n² = {1000 * n * n}")
    transition = {}
    for s in reach.states:
        if s in (TOP, BOT):
            transition[s] = reach.transition[s]
            continue
        if reach.source is not None:
            dist = normalize_to_fp_distribution(_rounded_source_row(reach.source, s, ell))
        else:
            dist = fp_distribution_from_exact(reach.transition[s], ell)
        transition[s] = dist.probabilities
    rounded = ReachMC(reach.states, transition, reach.source)

    budget = n + 3
    for s in reach.transient:
        if not distributions_close(rounded.transition[s], reach.transition[s], ell, budget):
            raise ArithmeticError(f"rounded row of {s} is not ({ell}, {budget})-close to the exact row")
    logger.debug(f"Rounded {n}-state reachability chain to precision {ell}")
    return rounded


def _check_absorbing(reach: ReachMC):
    succ = {s: {t for t, p in zip(reach.states, reach.transition[s]) if p > 0} for s in reach.states}
    for s in (TOP, BOT):
        if succ[s] != {s}:
            raise ChainNotAbsorbingError(f"{s} must self-loop with probability 1")
    absorbed = {TOP, BOT}
    changed = True
    while changed:
        changed = False
        for s in reach.transient:
            if s not in absorbed and succ[s] & absorbed:
                absorbed.add(s)
                changed = True
    stuck = [s for s in reach.transient if s not in absorbed]
    if stuck:
        raise ChainNotAbsorbingError(f"states {stuck} never reach an absorbing state")


def reach_value(reach: ReachMC) -> Dict[str, Fraction]:
    """Exact probability of reaching TOP: solve (Id − Q)x = b over the transient states."""
    _check_absorbing(reach)
    transient = reach.transient
    index = [reach.states.index(t) for t in transient]
    top = reach.states.index(TOP)
    mat = RatMatrix.from_rows([
        [int(i == j) - reach.transition[s][k] for j, k in enumerate(index)]
        for i, s in enumerate(transient)
    ])
    x = solve_linear(mat, [reach.transition[s][top] for s in transient])
    values = dict(zip(transient, x))
    values[TOP] = ONE
    values[BOT] = Fraction(0)
    return values


def round_values(values: Dict[str, Fraction], ell: int) -> Dict[str, FpNumber]:
    """Truncate into 𝓕(ℓ); each value in [0, 1] moves by at most 2^(1−ℓ)."""
    return {s: truncate(v, ell) for s, v in values.items()}


def max_rel_distance(first: ReachMC, second: ReachMC) -> Fraction:
    """Largest entrywise rel over positive entries; both chains must share their support."""
    if first.states != second.states:
        raise ValueError("chains have different state sets")
    worst = Fraction(0)
    for s in first.states:
        for p, q in zip(first.transition[s], second.transition[s]):
            if p == 0 and q == 0:
                continue
            if p == 0 or q == 0:
                raise ValueError(f"chains differ in support at {s}")
            worst = max(worst, rel_distance(p, q))
    return worst


def mc_discounted_approx(mc: InducedMC, ell: int, strict: bool = True) -> Dict[str, FpNumber]:
    """
    Discounted values of a chain through the rounded reachability pipeline.

    The result is checked against the exact solve: every state lies within
    104·n⁴·2^(−ℓ) of its value.
    """
    n = len(mc.states)
    reach = mc_discounted_to_reachability(mc)
    rounded = fp_round_chain(reach, ell, strict)
    approx = round_values({s: v for s, v in reach_value(rounded).items() if s in mc.states}, ell)

    exact = reach_value(reach)
    bound = Fraction(104 * n ** 4, 1 << ell)
    for s in mc.states:
        if abs(approx[s].value - exact[s]) > bound:
            raise ArithmeticError(f"approximate value at {s} misses the 104n⁴2^-{ell} bound")
    logger.info(f"Approximated discounted values of a {n}-state chain at precision {ell}")
    return approx
