from fractions import Fraction
from random import Random
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from Engines.limit_engine.engine import compute_limit_constants
from .exceptions import PolynomialError
from .models import MultiPoly
from .services import (
    dyadic_bound_holds,
    eval_poly,
    region_constant,
    region_contains,
    sample_region_check,
)


def random_poly(rng: Random, k: int, max_degree: int = 3, max_coef: int = 100, terms: int = 5) -> MultiPoly:
    coefs = {}
    for _ in range(terms):
        exps = tuple(rng.randint(0, max_degree) for _ in range(k))
        coefs[exps] = rng.randint(-max_coef, max_coef)
    if not any(coefs.values()):
        coefs[(0,) * k] = 1
    return MultiPoly.from_terms(k, coefs)


def term_sum(p: MultiPoly, point):
    total = Fraction(0)
    for exps, coef in p.terms.items():
        term = Fraction(coef)
        for x, e in zip(point, exps):
            term *= Fraction(x) ** e
        total += term
    return total


class MultiPolyTests(SimpleTestCase):
    def test_zero_coefficients_dropped(self):
        p = MultiPoly.from_terms(2, {(1, 0): 0, (0, 1): 3, (2, 2): 0})
        self.assertEqual(p.terms, {(0, 1): 3})
        self.assertEqual(p.degrees, (0, 1))

    def test_degrees_enforced(self):
        with self.assertRaises(PolynomialError):
            MultiPoly.from_terms(1, {(3,): 1}, degrees=(2,))
        with self.assertRaises(PolynomialError):
            MultiPoly.from_terms(2, {(1,): 1})


class EvalTests(SimpleTestCase):
    def test_product(self):
        self.assertEqual(eval_poly(MultiPoly.from_terms(2, {(1, 1): 1}), [2, 3]), 6)

    def test_zero_polynomial(self):
        self.assertEqual(eval_poly(MultiPoly.from_terms(3, {}), [Fraction(1, 3), 5, -2]), 0)

    def test_arity(self):
        with self.assertRaises(PolynomialError):
            eval_poly(MultiPoly.from_terms(2, {(1, 1): 1}), [1])

    @given(st.integers(min_value=0, max_value=10 ** 6),
           st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=50), min_size=3, max_size=3))
    @settings(max_examples=100, deadline=None, derandomize=True)
    def test_horner_matches_term_sum(self, seed, point):
        p = random_poly(Random(seed), 3, terms=8)
        self.assertEqual(eval_poly(p, point), term_sum(p, point))


class RegionConstantTests(SimpleTestCase):
    def test_linear_monomial(self):
        self.assertEqual(region_constant(MultiPoly.from_terms(1, {(1,): 1})), 6)

    def test_one_minus_two_x(self):
        self.assertEqual(region_constant(MultiPoly.from_terms(1, {(0,): 1, (1,): -2})), 7)

    def test_zero_polynomial(self):
        with self.assertRaises(PolynomialError):
            region_constant(MultiPoly.from_terms(2, {}))

    def test_random_recomputation(self):
        rng = Random(31)
        for _ in range(50):
            k = rng.randint(1, 3)
            p = random_poly(rng, k)
            d = max(1, max(max(e[i] for e in p.terms) for i in range(k)))
            b = max(len(bin(abs(c))) - 2 for c in p.terms.values())
            self.assertEqual(region_constant(p), 4 * k * d.bit_length() + b + 1)


class RegionSamplingTests(SimpleTestCase):
    def test_monomial_bound(self):
        p = MultiPoly.from_terms(1, {(1,): 1})
        b1 = region_constant(p)
        for k in range(1, 65):
            x = Fraction(k, 1 << (b1 + 6))
            self.assertTrue(region_contains([x], 1, b1))
            self.assertGreaterEqual(x, 2 ** (b1 - 1) * x ** 2)
            self.assertTrue(dyadic_bound_holds(p, [(k, b1 + 6)], b1))

    def test_root_outside_region(self):
        p = MultiPoly.from_terms(1, {(0,): 1, (1,): -2})
        report = sample_region_check(p, 200, seed=1)
        self.assertTrue(report.ok)
        self.assertEqual(report.b1, 7)
        self.assertFalse(region_contains([Fraction(1, 2)], 1, report.b1))

    def test_random_bivariate_sweep(self):
        rng = Random(32)
        for seed in range(50):
            p = random_poly(rng, 2)
            report = sample_region_check(p, 1000, seed)
            self.assertEqual(report.samples, 1000)
            self.assertEqual(report.violations, [])

    def test_trivariate(self):
        rng = Random(33)
        for seed in range(5):
            self.assertTrue(sample_region_check(random_poly(rng, 3, max_degree=2), 100, seed).ok)

    def test_region_membership(self):
        self.assertTrue(region_contains([Fraction(1, 64), Fraction(1, 64 ** 3)], 2, 6))
        self.assertFalse(region_contains([Fraction(1, 64), Fraction(1, 64 ** 2)], 2, 6))
        self.assertFalse(region_contains([Fraction(0)], 1, 1))
        self.assertFalse(region_contains([], 1, 1))

    def test_limit_factors_inside_region(self):
        for n, m, d, bits in ((1, 1, 1, 1), (2, 2, 2, 1), (3, 2, 2, 2)):
            constants = compute_limit_constants(n, m, d, bits, Fraction(1, 8))
            self.assertTrue(region_contains(constants.lambdas, n * constants.D, constants.B1))
