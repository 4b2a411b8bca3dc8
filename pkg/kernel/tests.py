from fractions import Fraction
from random import Random
from django.test import SimpleTestCase

from games.models import DiscountSpec, InducedMC
from games.samples import (
    constant_game,
    make_game,
    matching_pennies,
    random_discount,
    random_game,
    random_strategy,
    single_discount,
)
from games.services import enumerate_pure, induce_mc, pure_to_mixed
from linalg.services import bareiss_det
from matrixgames.services import game_value
from .services import (
    build_kernel,
    build_w,
    det_lower_bound_check,
    discounted_payoff,
    kernel_entry,
    lift_strategy,
    mc_discounted_values,
    mixed_kernel_entry,
    system_matrix,
    value_iteration,
    value_iteration_oracle,
)


class KernelEntryTests(SimpleTestCase):
    def test_single_state(self):
        lam, c = Fraction(1, 3), Fraction(2, 5)
        game = constant_game(c)
        p1, = enumerate_pure(game, 1)
        p2, = enumerate_pure(game, 2)
        entry = kernel_entry(game, single_discount(game, lam), "s", p1, p2)
        self.assertEqual(entry.nabla, lam)
        self.assertEqual(entry.nabla_s, lam * c)

    def test_full_discount_gives_unit_determinant(self):
        rng = Random(8)
        game = random_game(rng, 3, 2)
        disc = single_discount(game, Fraction(1))
        for p1 in enumerate_pure(game, 1)[:3]:
            for p2 in enumerate_pure(game, 2)[:3]:
                self.assertEqual(kernel_entry(game, disc, "s0", p1, p2).nabla, 1)

    def test_cramer_matches_linear_solve(self):
        rng = Random(13)
        for _ in range(100):
            game = random_game(rng, rng.randint(1, 3), 2)
            disc = random_discount(rng, game, d=2)
            p1 = rng.choice(enumerate_pure(game, 1))
            p2 = rng.choice(enumerate_pure(game, 2))
            state = rng.choice(game.states)
            entry = kernel_entry(game, disc, state, p1, p2)
            expected = discounted_payoff(game, disc, state, pure_to_mixed(game, p1), pure_to_mixed(game, p2))
            self.assertEqual(entry.payoff, expected)


class DiscountedPayoffTests(SimpleTestCase):
    def test_constant_reward(self):
        c = Fraction(3, 7)
        game = constant_game(c)
        sigma = pure_to_mixed(game, enumerate_pure(game, 1)[0])
        tau = pure_to_mixed(game, enumerate_pure(game, 2)[0])
        for lam in (Fraction(1, 9), Fraction(1, 2), Fraction(1)):
            self.assertEqual(discounted_payoff(game, single_discount(game, lam), "s", sigma, tau), c)

    def test_zero_reward(self):
        rng = Random(2)
        game = random_game(rng, 3, 2, reward_den=1)
        game = make_game(game.states, game.actions1, game.actions2,
                         {k: dict(zip(game.states, v)) for k, v in game.transition.items()},
                         {k: 0 for k in game.rewards})
        disc = random_discount(rng, game)
        values = mc_discounted_values(induce_mc(game, random_strategy(rng, game, 1), random_strategy(rng, game, 2), disc))
        self.assertTrue(all(v == 0 for v in values.values()))

    def test_mixed_profiles_are_lifted_kernel_averages(self):
        rng = Random(17)
        for _ in range(15):
            game = random_game(rng, 2, 2)
            disc = random_discount(rng, game)
            sigma = random_strategy(rng, game, 1)
            tau = random_strategy(rng, game, 2)
            table = build_kernel(game, disc, "s0")
            entry = mixed_kernel_entry(table, game, sigma, tau)
            mc = induce_mc(game, sigma, tau, disc)
            self.assertEqual(entry.nabla, bareiss_det(system_matrix(mc)))
            self.assertEqual(entry.payoff, discounted_payoff(game, disc, "s0", sigma, tau))

    def test_lift_weights_sum_to_one(self):
        rng = Random(3)
        game = random_game(rng, 3, 2)
        lifted = lift_strategy(game, random_strategy(rng, game, 1))
        self.assertEqual(len(lifted), 8)
        self.assertEqual(sum(w for _, w in lifted), 1)


class WMatrixTests(SimpleTestCase):
    def test_single_state_zero_at_reward(self):
        lam, c = Fraction(1, 2), Fraction(1, 3)
        game = constant_game(c)
        disc = single_discount(game, lam)
        for z in (Fraction(0), c, Fraction(1)):
            w = build_w(game, disc, "s", z)
            self.assertEqual(w.payoff.at(0, 0), lam * c - z * lam)
        self.assertEqual(game_value(build_w(game, disc, "s", c)).value, 0)

    def test_matching_pennies_zero_at_half(self):
        game = matching_pennies()
        w = build_w(game, single_discount(game, Fraction(1, 2)), "s", Fraction(1, 2))
        self.assertEqual(game_value(w).value, 0)

    def test_strictly_decreasing_with_slope(self):
        rng = Random(29)
        pairs = 0
        while pairs < 200:
            game = random_game(rng, rng.randint(1, 2), 2)
            disc = random_discount(rng, game, d=2)
            table = build_kernel(game, disc, game.states[0])
            lam_min = min(disc.discount(s) for s in game.states)
            for _ in range(4):
                z1, z2 = sorted(Fraction(rng.randint(0, 64), 64) for _ in range(2))
                if z1 == z2:
                    continue
                v1 = game_value(table.at(z1)).value
                v2 = game_value(table.at(z2)).value
                self.assertGreaterEqual(v1, v2 + (z2 - z1) * lam_min ** game.n)
                pairs += 1

    def test_dimensions_follow_enumeration(self):
        game = random_game(Random(1), 2, 2)
        table = build_kernel(game, single_discount(game, Fraction(1, 4)), "s1")
        self.assertEqual([p.key for p in table.rows], [p.key for p in enumerate_pure(game, 1)])
        self.assertEqual(len(table.entries), 4)
        self.assertEqual(len(table.entries[0]), 4)
        self.assertGreaterEqual(table.min_nabla, Fraction(1, 4) ** 2)


class ValueIterationOracleTests(SimpleTestCase):
    def test_constant_game(self):
        c = Fraction(5, 9)
        game = constant_game(c)
        lo, hi = value_iteration_oracle(game, single_discount(game, Fraction(1, 4)), Fraction(1, 1024))["s"]
        self.assertTrue(lo <= c <= hi)
        self.assertLessEqual(hi - lo, Fraction(2, 1024))

    def test_reward_one_everywhere(self):
        rng = Random(6)
        base = random_game(rng, 3, 2)
        game = make_game(base.states, base.actions1, base.actions2,
                         {k: dict(zip(base.states, v)) for k, v in base.transition.items()},
                         {k: 1 for k in base.rewards})
        intervals = value_iteration_oracle(game, random_discount(rng, game), Fraction(1, 256))
        for lo, hi in intervals.values():
            self.assertTrue(lo <= 1 <= hi)

    def test_widths_and_strategies(self):
        rng = Random(12)
        game = random_game(rng, 3, 2)
        tol = Fraction(1, 512)
        result = value_iteration(game, single_discount(game, Fraction(1, 4)), tol)
        for lo, hi in result.intervals.values():
            self.assertLessEqual(hi - lo, 2 * tol)
        self.assertEqual(result.sigma.player, 1)
        self.assertEqual(set(result.tau.rows), set(game.states))

    def test_rejects_non_positive_tolerance(self):
        game = constant_game(Fraction(1, 2))
        with self.assertRaises(ValueError):
            value_iteration_oracle(game, single_discount(game, Fraction(1, 2)), Fraction(0))


class DeterminantBoundTests(SimpleTestCase):
    def test_single_state_equality(self):
        lam = Fraction(1, 5)
        mc = InducedMC(("s",), {"s": (Fraction(1),)}, {"s": Fraction(0)}, {"s": lam})
        self.assertTrue(det_lower_bound_check(mc))
        self.assertEqual(bareiss_det(system_matrix(mc)), lam)

    def test_full_discount(self):
        mc = InducedMC(("s", "t"), {"s": (Fraction(0), Fraction(1)), "t": (Fraction(1), Fraction(0))},
                       {"s": Fraction(0), "t": Fraction(0)}, {"s": Fraction(1), "t": Fraction(1)})
        self.assertTrue(det_lower_bound_check(mc))

    def test_random_chains(self):
        rng = Random(31)
        for _ in range(40):
            game = random_game(rng, rng.randint(1, 4), 2)
            disc = random_discount(rng, game, d=3)
            mc = induce_mc(game, random_strategy(rng, game, 1), random_strategy(rng, game, 2), disc)
            self.assertTrue(det_lower_bound_check(mc))
