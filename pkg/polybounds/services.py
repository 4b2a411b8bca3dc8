from fractions import Fraction
from random import Random
from typing import Dict, List, Sequence, Tuple
import logging

from .exceptions import PolynomialError
from .models import Exponents, MultiPoly, SampleReport

logger = logging.getLogger(__name__)

# bits of randomness per sampled coordinate below its admissible maximum
SAMPLE_BITS = 16


def _check_arity(p: MultiPoly, point: Sequence) -> None:
    if len(point) != p.num_vars:
        raise PolynomialError(f"point of length {len(point)} for a {p.num_vars}-variate polynomial")


def _horner(terms: Dict[Exponents, int], point: Sequence[Fraction]) -> Fraction:
    if not point:
        return Fraction(terms.get((), 0))
    # collect by the power of the first variable, then Horner in it
    by_power: Dict[int, Dict[Exponents, int]] = {}
    for exps, coef in terms.items():
        by_power.setdefault(exps[0], {})[exps[1:]] = coef
    x, rest = point[0], point[1:]
    acc = Fraction(0)
    for power in range(max(by_power), -1, -1):
        acc = acc * x + (_horner(by_power[power], rest) if power in by_power else 0)
    return acc


def eval_poly(p: MultiPoly, point: Sequence[Fraction]) -> Fraction:
    _check_arity(p, point)
    if p.is_zero:
        return Fraction(0)
    return _horner(p.terms, [Fraction(x) for x in point])


def _bit(k: int) -> int:
    return k.bit_length()


def region_constant(p: MultiPoly) -> int:
    """B1 = 4·k·bit(D) + B + 1 for k variables, D the largest degree (at least 1) and B the coefficient bit-size."""
    if p.is_zero:
        raise PolynomialError("the zero polynomial has no root-free region")
    return 4 * p.num_vars * _bit(max(1, p.max_degree)) + p.coefficient_bits + 1


def region_contains(point: Sequence[Fraction], degree: int, b1: int) -> bool:
    """x₁ ∈ (0, 2^(−B1)] and xᵢ ∈ (0, x_{i−1}^(D+1)] for the later coordinates."""
    if not point:
        return False
    bound = Fraction(1, 1 << b1)
    for x in point:
        if not 0 < x <= bound:
            return False
        bound = Fraction(x) ** (degree + 1)
    return True


def _dyadic_point(rng: Random, k: int, degree: int, b1: int) -> List[Tuple[int, int]]:
    """Coordinates as (a, e) meaning a·2^(−e), each within its admissible interval."""
    point = []
    a, e = 1, b1
    for _ in range(k):
        m = rng.randint(1, 1 << SAMPLE_BITS)
        point.append((a * m, e + SAMPLE_BITS))
        a, e = (a * m) ** (degree + 1), (e + SAMPLE_BITS) * (degree + 1)
    return point


def dyadic_bound_holds(p: MultiPoly, point: Sequence[Tuple[int, int]], b1: int) -> bool:
    """
    |P(x)| ≥ 2^(B1−k)·x_k^(D+1) at a dyadic point, decided with integers only.

    With xᵢ = aᵢ·2^(−eᵢ), N = P(x)·2^(Σ Dᵢeᵢ) is an integer and the bound
    becomes |N|·2^(e_k(D+1)) ≥ 2^(B1−k)·a_k^(D+1)·2^(Σ Dᵢeᵢ).
    """
    k = p.num_vars
    _check_arity(p, point)
    degree = max(1, p.max_degree)
    scale = sum(d * e for d, (_, e) in zip(p.degrees, point))
    total = 0
    for exps, coef in p.terms.items():
        term = coef
        shift = 0
        for j, d, (a, e) in zip(exps, p.degrees, point):
            term *= a ** j
            shift += e * (d - j)
        total += term << shift
    a_k, e_k = point[-1]
    return abs(total) << (e_k * (degree + 1)) >= (a_k ** (degree + 1)) << (b1 - k + scale)


def sample_region_check(p: MultiPoly, samples: int, seed: int) -> SampleReport:
    """Draw seeded dyadic points from the root-free region and check the lower bound exactly at each."""
    b1 = region_constant(p)
    degree = max(1, p.max_degree)
    rng = Random(seed)
    report = SampleReport(b1=b1, samples=samples)
    for _ in range(samples):
        point = _dyadic_point(rng, p.num_vars, degree, b1)
        if not dyadic_bound_holds(p, point, b1):
            report.violations.append(tuple(Fraction(a, 1 << e) for a, e in point))
    if report.violations:
        logger.error(f"Root-free bound violated at {len(report.violations)} of {samples} points")
    return report
