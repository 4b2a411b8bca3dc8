from fractions import Fraction
from random import Random
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from games.models import InducedMC
from kernel.services import mc_discounted_values
from .exceptions import ChainNotAbsorbingError, FpArithmeticError
from .models import BOT, TOP, FpNumber, ReachMC
from .services import (
    closeness_bound,
    closeness_index,
    fp_add,
    fp_distribution_from_exact,
    fp_div,
    fp_mul,
    fp_round_chain,
    fp_sub,
    is_close,
    is_representable,
    max_rel_distance,
    mc_discounted_approx,
    mc_discounted_to_reachability,
    normalize_to_fp_distribution,
    reach_value,
    rel_distance,
    round_values,
    truncate,
)

positive = st.fractions(min_value=Fraction(1, 10 ** 6), max_value=10 ** 6)


def dyadic_row(rng: Random, size: int, bits: int = 6):
    """Random distribution with denominators 2^bits."""
    cuts = sorted(rng.randint(0, 1 << bits) for _ in range(size - 1))
    edges = [0] + cuts + [1 << bits]
    return tuple(Fraction(b - a, 1 << bits) for a, b in zip(edges, edges[1:]))


def random_dyadic_mc(rng: Random, n: int) -> InducedMC:
    states = tuple(f"s{i}" for i in range(n))
    return InducedMC(
        states,
        {s: dyadic_row(rng, n) for s in states},
        {s: Fraction(rng.randint(0, 32), 32) for s in states},
        {s: Fraction(rng.randint(1, 16), 16) for s in states},
    )


def random_reach_chain(rng: Random, n: int) -> ReachMC:
    states = tuple(f"t{i}" for i in range(n)) + (TOP, BOT)
    transition = {}
    for s in states[:n]:
        weights = [rng.randint(0, 5) for _ in range(n)] + [rng.randint(1, 3), rng.randint(0, 3)]
        total = sum(weights)
        transition[s] = tuple(Fraction(w, total) for w in weights)
    transition[TOP] = tuple(Fraction(int(t == TOP)) for t in states)
    transition[BOT] = tuple(Fraction(int(t == BOT)) for t in states)
    return ReachMC(states, transition)


def perturb(rng: Random, chain: ReachMC, delta: Fraction) -> ReachMC:
    transition = dict(chain.transition)
    for s in chain.transient:
        row = [p * (1 + delta * Fraction(rng.randint(-100, 100), 100)) for p in chain.transition[s]]
        total = sum(row)
        transition[s] = tuple(p / total for p in row)
    return ReachMC(chain.states, transition)


class TruncatingArithmeticTests(SimpleTestCase):
    def test_canonical_form(self):
        self.assertEqual(truncate(Fraction(6), 8), FpNumber(3, 1, 8))
        self.assertEqual(truncate(Fraction(0), 8), FpNumber(0, 0, 8))
        self.assertEqual(truncate(Fraction(3, 4), 8), FpNumber(3, -2, 8))

    def test_multiplication_truncates(self):
        three = truncate(Fraction(3), 3)
        self.assertEqual(fp_mul(three, three).value, 8)

    def test_addition_exact_when_representable(self):
        one = truncate(Fraction(1), 3)
        self.assertEqual(fp_add(one, one).value, 2)

    def test_errors(self):
        a, b = truncate(Fraction(1), 8), truncate(Fraction(2), 8)
        with self.assertRaises(FpArithmeticError):
            fp_sub(a, b)
        with self.assertRaises(FpArithmeticError):
            fp_div(a, truncate(Fraction(0), 8))
        with self.assertRaises(FpArithmeticError):
            fp_add(a, truncate(Fraction(1), 9))
        with self.assertRaises(FpArithmeticError):
            truncate(Fraction(-1, 2), 8)

    @given(positive, st.integers(min_value=2, max_value=64))
    @settings(max_examples=200, deadline=None, derandomize=True)
    def test_truncation_rounds_toward_zero(self, x, ell):
        t = truncate(x, ell)
        self.assertLessEqual(t.value, x)
        self.assertLess(t.mantissa, 1 << ell)
        self.assertEqual(t.mantissa % 2, 1)
        self.assertTrue(is_close(x, t.value, ell, 1))

    def test_random_operations_stay_within_one_step(self):
        rng = Random(8)
        ell = 8
        bound = closeness_bound(ell, 1)
        for _ in range(500):
            a = truncate(Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)), ell)
            b = truncate(Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)), ell)
            pairs = [(fp_add(a, b), a.value + b.value), (fp_mul(a, b), a.value * b.value),
                     (fp_div(a, b), a.value / b.value)]
            if a.value > b.value:
                pairs.append((fp_sub(a, b), a.value - b.value))
            for approx, exact in pairs:
                self.assertLessEqual(approx.value, exact)
                self.assertLessEqual(rel_distance(exact, approx.value), bound)

    def test_closeness_bookkeeping_on_operation_chains(self):
        rng = Random(11)
        ell = 16
        for _ in range(100):
            xs = [Fraction(rng.randint(1, 999), rng.randint(1, 999)) for _ in range(6)]
            # (approximation, exact, closeness index)
            terms = [(truncate(x, ell), x, 1) for x in xs]
            while len(terms) > 1:
                (a, x, i), (b, y, j) = terms.pop(), terms.pop()
                if rng.random() < 0.5:
                    terms.append((fp_add(a, b), x + y, max(i, j) + 1))
                else:
                    terms.append((fp_mul(a, b), x * y, i + j + 1))
            approx, exact, index = terms[0]
            self.assertTrue(is_close(approx.value, exact, ell, index))

    def test_subtraction_of_representable_inputs(self):
        rng = Random(12)
        ell = 12
        for _ in range(200):
            a = truncate(Fraction(rng.randint(2, 10 ** 4), rng.randint(1, 100)), ell)
            b = truncate(Fraction(rng.randint(1, 10 ** 4), rng.randint(101, 10 ** 4)), ell)
            if a.value > b.value:
                self.assertTrue(is_close(fp_sub(a, b).value, a.value - b.value, ell, 1))


class ClosenessTests(SimpleTestCase):
    def test_relative_distance(self):
        self.assertEqual(rel_distance(1, 1), 0)
        self.assertEqual(rel_distance(2, 1), 1)
        self.assertEqual(rel_distance(8, 9), Fraction(1, 8))
        with self.assertRaises(FpArithmeticError):
            rel_distance(0, 1)

    def test_is_close(self):
        self.assertTrue(is_close(Fraction(7, 3), Fraction(7, 3), 5, 0))
        self.assertFalse(is_close(1, 2, 3, 1))
        self.assertEqual(closeness_bound(3, 1), Fraction(1, 3))
        self.assertFalse(is_close(0, Fraction(1, 2), 8, 4))

    def test_transitivity(self):
        rng = Random(5)
        ell = 8
        for _ in range(300):
            x = Fraction(rng.randint(1000, 2000), 1000)
            y = x * (1 + Fraction(rng.randint(-20, 20), 2000))
            z = y * (1 + Fraction(rng.randint(-20, 20), 2000))
            i, j = closeness_index(x, y, ell), closeness_index(y, z, ell)
            self.assertTrue(is_close(x, z, ell, i + j))


class DistributionTests(SimpleTestCase):
    def test_equal_weights_give_uniform(self):
        w = truncate(Fraction(5, 7), 10)
        self.assertEqual(normalize_to_fp_distribution([w, w]).probabilities, (Fraction(1, 2), Fraction(1, 2)))

    def test_single_weight_is_dirac(self):
        dist = normalize_to_fp_distribution([truncate(Fraction(3, 5), 10)])
        self.assertEqual(dist.probabilities, (Fraction(1),))

    def test_all_zero_rejected(self):
        zero = truncate(Fraction(0), 10)
        with self.assertRaises(FpArithmeticError):
            normalize_to_fp_distribution([zero, zero])

    def test_random_weights_at_large_precision(self):
        rng = Random(3)
        ell = 1000
        for _ in range(50):
            t = rng.randint(1, 5)
            xs = [truncate(Fraction(rng.randint(0, 10 ** 9), rng.randint(1, 10 ** 9)), ell) for _ in range(t)]
            if all(x.is_zero for x in xs):
                continue
            dist = normalize_to_fp_distribution(xs)
            total = sum(x.value for x in xs)
            for p, x in zip(dist.probabilities, xs):
                self.assertTrue(is_close(p, x.value / total, ell, 2 * t))
            self.assertTrue(is_close(dist.total, 1, ell, t))

    def test_from_exact_distribution(self):
        rng = Random(4)
        ell = 20
        for _ in range(100):
            weights = [rng.randint(0, 9) for _ in range(rng.randint(1, 6))]
            if not any(weights):
                continue
            mu = [Fraction(w, sum(weights)) for w in weights]
            dist = fp_distribution_from_exact(mu, ell)
            self.assertTrue(all(is_close(p, q, ell, 2 * len(mu) + 2) for p, q in zip(dist.probabilities, mu)))

    def test_from_exact_rejects_non_distribution(self):
        with self.assertRaises(FpArithmeticError):
            fp_distribution_from_exact([Fraction(1, 2), Fraction(1, 3)], 10)


class ReductionTests(SimpleTestCase):
    def test_single_state(self):
        lam, c = Fraction(1, 3), Fraction(2, 5)
        mc = InducedMC(("s",), {"s": (Fraction(1),)}, {"s": c}, {"s": lam})
        reach = mc_discounted_to_reachability(mc)
        self.assertEqual(reach.p("s", TOP), lam * c)
        self.assertEqual(reach.p("s", BOT), lam * (1 - c))
        self.assertEqual(reach.p("s", "s"), 1 - lam)
        self.assertEqual(reach_value(reach)["s"], c)

    def test_reward_one_never_reaches_bot(self):
        rng = Random(6)
        mc = random_dyadic_mc(rng, 3)
        mc = InducedMC(mc.states, mc.transition, {s: Fraction(1) for s in mc.states}, mc.discount)
        reach = mc_discounted_to_reachability(mc)
        self.assertTrue(all(reach.p(s, BOT) == 0 for s in mc.states))
        self.assertEqual({s: reach_value(reach)[s] for s in mc.states}, {s: 1 for s in mc.states})

    def test_reduction_preserves_values(self):
        rng = Random(7)
        for _ in range(100):
            states = tuple(f"s{i}" for i in range(4))
            mc = InducedMC(
                states,
                {s: tuple(Fraction(w, 10) for w in (1, 2, 3, 4)) if rng.random() < 0.5 else dyadic_row(rng, 4)
                 for s in states},
                {s: Fraction(rng.randint(0, 7), 7) for s in states},
                {s: Fraction(rng.randint(1, 9), 9) for s in states},
            )
            exact = mc_discounted_values(mc)
            values = reach_value(mc_discounted_to_reachability(mc))
            self.assertEqual({s: values[s] for s in states}, exact)

    def test_zero_discount_rejected(self):
        mc = InducedMC(("s",), {"s": (Fraction(1),)}, {"s": Fraction(1, 2)}, {"s": Fraction(0)})
        with self.assertRaises(ValueError):
            mc_discounted_to_reachability(mc)


class RoundedChainTests(SimpleTestCase):
    def test_representable_chain_unchanged(self):
        mc = InducedMC(("s",), {"s": (Fraction(1),)}, {"s": Fraction(1, 2)}, {"s": Fraction(1, 2)})
        reach = mc_discounted_to_reachability(mc)
        rounded = fp_round_chain(reach, 16, strict=False)
        self.assertEqual(rounded.transition, reach.transition)
        self.assertLessEqual(max_rel_distance(reach, rounded), Fraction(6, 1 << 16))

    def test_precision_floor(self):
        reach = mc_discounted_to_reachability(random_dyadic_mc(Random(1), 2))
        with self.assertRaises(FpArithmeticError):
            fp_round_chain(reach, 3999)

    def test_inputs_must_be_representable(self):
        mc = InducedMC(("s",), {"s": (Fraction(1),)}, {"s": Fraction(1, 3)}, {"s": Fraction(1, 2)})
        with self.assertRaises(FpArithmeticError):
            fp_round_chain(mc_discounted_to_reachability(mc), 16, strict=False)

    def test_random_chains_at_required_precision(self):
        rng = Random(9)
        for _ in range(10):
            n = rng.randint(1, 2)
            ell = 1000 * n * n
            reach = mc_discounted_to_reachability(random_dyadic_mc(rng, n))
            rounded = fp_round_chain(reach, ell)
            self.assertLessEqual(max_rel_distance(reach, rounded), closeness_bound(ell, n + 3))

    def test_small_precision_rows_stay_close(self):
        rng = Random(10)
        for _ in range(50):
            n = rng.randint(1, 4)
            reach = random_reach_chain(rng, n)
            rounded = fp_round_chain(reach, 12, strict=False)
            self.assertLessEqual(max_rel_distance(reach, rounded), closeness_bound(12, n + 3))

    def test_rounded_source_rows_within_six_n_ulps(self):
        rng = Random(21)
        ell = 12
        for _ in range(300):
            n = rng.randint(2, 4)
            reach = mc_discounted_to_reachability(random_dyadic_mc(rng, n))
            rounded = fp_round_chain(reach, ell, strict=False)
            self.assertLessEqual(max_rel_distance(reach, rounded), Fraction(6 * n, 1 << ell))


class ReachValueTests(SimpleTestCase):
    def test_absorbing_states(self):
        values = reach_value(random_reach_chain(Random(1), 2))
        self.assertEqual(values[TOP], 1)
        self.assertEqual(values[BOT], 0)

    def test_single_step(self):
        p = Fraction(3, 7)
        states = ("s", TOP, BOT)
        chain = ReachMC(states, {
            "s": (Fraction(0), p, 1 - p),
            TOP: (Fraction(0), Fraction(1), Fraction(0)),
            BOT: (Fraction(0), Fraction(0), Fraction(1)),
        })
        self.assertEqual(reach_value(chain)["s"], p)

    def test_bellman_residual_is_zero(self):
        rng = Random(2)
        for _ in range(30):
            chain = random_reach_chain(rng, rng.randint(1, 5))
            values = reach_value(chain)
            for s in chain.transient:
                self.assertEqual(values[s], sum(p * values[t] for p, t in zip(chain.transition[s], chain.states)))

    def test_non_absorbing_chain_rejected(self):
        states = ("a", "b", TOP, BOT)
        chain = ReachMC(states, {
            "a": (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
            "b": (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
            TOP: (Fraction(0), Fraction(0), Fraction(1), Fraction(0)),
            BOT: (Fraction(0), Fraction(0), Fraction(0), Fraction(1)),
        })
        with self.assertRaises(ChainNotAbsorbingError):
            reach_value(chain)

    def test_perturbation_bound(self):
        rng = Random(13)
        for _ in range(200):
            n = rng.randint(1, 4)
            chain = random_reach_chain(rng, n)
            other = perturb(rng, chain, Fraction(1, 1024))
            eps = max_rel_distance(chain, other)
            v, w = reach_value(chain), reach_value(other)
            for s in chain.transient:
                self.assertLessEqual(abs(v[s] - w[s]), 4 * len(chain.states) * eps)

    def test_round_values(self):
        rounded = round_values({"s": Fraction(1, 3)}, 10)
        self.assertLessEqual(Fraction(1, 3) - rounded["s"].value, Fraction(2, 1 << 10))


class DiscountedApproxTests(SimpleTestCase):
    def test_half_reward(self):
        mc = InducedMC(("s",), {"s": (Fraction(1),)}, {"s": Fraction(1, 2)}, {"s": Fraction(1, 4)})
        approx = mc_discounted_approx(mc, 1000)
        self.assertLessEqual(abs(approx["s"].value - Fraction(1, 2)), Fraction(104, 1 << 1000))

    def test_zero_reward(self):
        mc = random_dyadic_mc(Random(3), 3)
        mc = InducedMC(mc.states, mc.transition, {s: Fraction(0) for s in mc.states}, mc.discount)
        approx = mc_discounted_approx(mc, 64, strict=False)
        self.assertTrue(all(v.is_zero for v in approx.values()))

    def test_random_chains(self):
        rng = Random(14)
        ell = 64
        for _ in range(100):
            n = rng.randint(1, 4)
            mc = random_dyadic_mc(rng, n)
            approx = mc_discounted_approx(mc, ell, strict=False)
            exact = mc_discounted_values(mc)
            for s in mc.states:
                self.assertLessEqual(abs(approx[s].value - exact[s]), Fraction(104 * n ** 4, 1 << ell))
                self.assertTrue(is_representable(approx[s].value, ell))
