from dataclasses import replace
from fractions import Fraction
from math import ceil, log2
from random import Random
from django.test import SimpleTestCase, override_settings

from games.exceptions import GameValidationError
from games.models import DiscountSpec, InducedMC
from games.samples import (
    absorbing_game,
    big_match,
    constant_game,
    make_game,
    matching_pennies,
    parity_cycle,
    random_discount,
    random_game,
    random_turn_based_parity,
    single_discount,
    swap_players,
)
from kernel.services import value_iteration_oracle
from Engines.discounted_engine.engine import DiscountedEngine, approx_discounted
from Engines.limit_engine.engine import (
    approx_limit,
    approx_limit_ladder,
    compute_limit_constants,
    game_bit_size,
    limit_constants,
    richardson,
    round_eps,
    solve_limit_exact,
)
from Engines.limit_engine.exceptions import ExactModeCapExceeded
from Engines.limit_engine.parity import (
    approx_parity,
    is_turn_based,
    mc_parity_probability,
    parity_to_limit,
    turn_based_parity_value,
)

LADDER = [Fraction(1, 2 ** k) for k in (4, 6, 8, 10, 12)]


class DiscountedEngineTests(SimpleTestCase):
    def test_single_state_value_is_reward(self):
        game = constant_game(Fraction(1, 2))
        value, bracket = approx_discounted(game, "s", None, single_discount(game, Fraction(1, 2)), Fraction(1, 64))
        self.assertLessEqual(abs(value - Fraction(1, 2)), Fraction(1, 64))
        self.assertEqual(bracket.iterations, 6)
        self.assertTrue(bracket.lo <= Fraction(1, 2) <= bracket.hi)

    def test_matching_pennies(self):
        game = matching_pennies()
        value, _ = approx_discounted(game, "s", None, single_discount(game, Fraction(1, 3)), Fraction(1, 128))
        self.assertLessEqual(abs(value - Fraction(1, 2)), Fraction(1, 128))

    def test_iteration_count(self):
        game = constant_game(Fraction(2, 7))
        engine = DiscountedEngine(game, "s", single_discount(game, Fraction(1, 4)))
        for eps in (Fraction(1, 3), Fraction(1, 8), Fraction(1, 100), Fraction(1)):
            _, bracket = engine.run(eps)
            self.assertEqual(bracket.iterations, ceil(log2(1 / eps)) if eps < 1 else 0)
            self.assertLessEqual(bracket.width, eps)

    def test_rewards_override(self):
        game = constant_game(Fraction(0))
        rewards = {("s", "a", "b"): Fraction(3, 4)}
        value, _ = approx_discounted(game, "s", rewards, single_discount(game, Fraction(1, 2)), Fraction(1, 32))
        self.assertLessEqual(abs(value - Fraction(3, 4)), Fraction(1, 32))

    def test_rejects_non_positive_eps(self):
        game = constant_game(Fraction(1, 2))
        with self.assertRaises(ValueError):
            approx_discounted(game, "s", None, single_discount(game, Fraction(1, 2)), Fraction(0))

    def test_probe_sign(self):
        game = matching_pennies()
        engine = DiscountedEngine(game, "s", single_discount(game, Fraction(1, 2)))
        self.assertEqual(engine.sign(Fraction(1, 2)), 0)
        self.assertEqual(engine.sign(Fraction(1, 4)), 1)
        self.assertEqual(engine.sign(Fraction(3, 4)), -1)

    def test_random_games_inside_oracle_intervals(self):
        rng = Random(2024)
        eps = Fraction(1, 2 ** 10)
        for _ in range(50):
            game = random_game(rng, rng.randint(1, 3), rng.randint(1, 2))
            disc = random_discount(rng, game, d=rng.randint(1, 2))
            state = rng.choice(game.states)
            engine = DiscountedEngine(game, state, disc)
            value, bracket = engine.run(eps)
            lo, hi = value_iteration_oracle(game, disc, Fraction(1, 2 ** 14))[state]
            self.assertTrue(lo - eps <= value <= hi + eps)
            # both enclosures hold the same exact value
            self.assertLessEqual(bracket.lo, hi)
            self.assertLessEqual(lo, bracket.hi)
            self.assertTrue(engine.recheck(bracket))

    def test_agrees_with_oracle_at_quarter_discount(self):
        rng = Random(99)
        game = random_game(rng, 3, 2)
        disc = single_discount(game, Fraction(1, 4))
        value, _ = approx_discounted(game, "s1", None, disc, Fraction(1, 256))
        lo, hi = value_iteration_oracle(game, disc, Fraction(1, 4096))["s1"]
        self.assertTrue(lo - Fraction(1, 256) <= value <= hi + Fraction(1, 256))


class LimitConstantsTests(SimpleTestCase):
    def test_single_state_formula(self):
        constants = compute_limit_constants(1, 1, 1, 1, Fraction(1, 8))
        self.assertEqual(constants.D, 1)
        self.assertEqual(constants.B1, 66)
        self.assertEqual(constants.lambdas, (Fraction(1, 2 ** 66),))

    def test_two_factor_formula(self):
        constants = compute_limit_constants(2, 2, 2, 1, Fraction(1, 8))
        self.assertEqual(constants.D, 4)
        self.assertEqual(constants.B1, 792)
        self.assertEqual(constants.lambdas[1], Fraction(1, 2 ** (792 * 9)))
        self.assertEqual(constants.lambdas[1], constants.lambdas[0] ** 9)

    def test_big_match(self):
        game = big_match()
        self.assertEqual(game_bit_size(game), 2)
        constants = limit_constants(game, {s: 1 for s in game.states}, Fraction(1, 32))
        # D = 2^3, B1 = 11·8·3·(2 + bit(3) + bit(8) + 5)
        self.assertEqual(constants.D, 8)
        self.assertEqual(constants.B1, 264 * 13)
        self.assertEqual(constants.lambdas, (Fraction(1, 2 ** 3432),))

    def test_eps_rounding(self):
        self.assertEqual(round_eps(Fraction(1, 8)), (3, Fraction(1, 8)))
        self.assertEqual(round_eps(Fraction(3, 16)), (3, Fraction(1, 8)))
        self.assertEqual(round_eps(Fraction(1, 10)), (4, Fraction(1, 16)))
        self.assertEqual(round_eps(Fraction(2)), (1, Fraction(1, 2)))
        with self.assertRaises(ValueError):
            round_eps(Fraction(0))

    def test_nesting(self):
        constants = compute_limit_constants(3, 2, 2, 3, Fraction(1, 4))
        self.assertEqual(constants.lambdas[1], constants.lambdas[0] ** (3 * 8 + 1))


class ApproxLimitTests(SimpleTestCase):
    eps = Fraction(1, 8)

    def test_constant_game(self):
        c = Fraction(3, 5)
        value = approx_limit(constant_game(c), "s", None, {"s": 1}, self.eps)
        self.assertLessEqual(abs(value - c), self.eps)

    def test_absorbing_reward_one(self):
        game = absorbing_game()
        value = approx_limit(game, "start", None, {"start": 1, "goal": 1}, self.eps)
        self.assertLessEqual(abs(value - 1), self.eps)

    def test_stable_under_eps_halving(self):
        game = constant_game(Fraction(1, 3))
        first = approx_limit(game, "s", None, {"s": 1}, self.eps)
        second = approx_limit(game, "s", None, {"s": 1}, self.eps / 2)
        self.assertLessEqual(abs(first - second), 3 * self.eps / 2)

    def test_exact_result_keeps_bracket(self):
        game = absorbing_game()
        result = solve_limit_exact(game, "start", None, {"start": 1, "goal": 1}, self.eps)
        self.assertTrue(result.bracket.lo <= result.value <= result.bracket.hi)
        self.assertEqual(result.bracket.width, self.eps / 2)
        self.assertEqual(result.bracket.iterations, 4)
        self.assertEqual(result.constants.kappa, 3)

    def test_reward_complement(self):
        c = Fraction(2, 7)
        v = approx_limit(constant_game(c), "s", None, {"s": 1}, self.eps)
        w = approx_limit(constant_game(1 - c), "s", None, {"s": 1}, self.eps)
        self.assertLessEqual(abs(v + w - 1), 2 * self.eps)

    def test_reward_complement_under_player_swap(self):
        rng = Random(33)
        games = [(big_match(), "play")] + [(random_game(rng, 2, 2), "s0") for _ in range(4)]
        for game, state in games:
            chi = {s: 1 for s in game.states}
            v = approx_limit(game, state, None, chi, self.eps)
            w = approx_limit(swap_players(game), state, None, chi, self.eps)
            self.assertLessEqual(abs(v + w - 1), 2 * self.eps)

    def test_exact_agrees_with_ladder_for_single_factor(self):
        game = absorbing_game()
        chi = {s: 1 for s in game.states}
        exact = approx_limit(game, "start", None, chi, self.eps)
        ladder = approx_limit_ladder(game, "start", None, chi, self.eps, LADDER)
        self.assertLessEqual(abs(exact - ladder.estimate), self.eps)

    def test_big_match_ladder(self):
        game = big_match()
        eps = Fraction(1, 32)
        result = approx_limit_ladder(game, "play", None, {s: 1 for s in game.states}, eps, LADDER)
        self.assertLessEqual(abs(result.estimate - Fraction(1, 2)), eps)
        self.assertEqual([p.lam for p in result.points], LADDER)

    def test_oracle_trend_on_big_match(self):
        # tolerance shrinks with λ so the certified midpoints close in on 1/2 along the ladder
        game = big_match()
        mids = []
        for t in LADDER:
            lo, hi = value_iteration_oracle(game, single_discount(game, t), t / 16)["play"]
            self.assertTrue(lo <= Fraction(1, 2) <= hi)
            mids.append((lo + hi) / 2)
        gaps = [abs(m - Fraction(1, 2)) for m in mids]
        self.assertEqual(gaps, sorted(gaps, reverse=True))
        self.assertLessEqual(abs(richardson(list(zip(LADDER, mids))) - Fraction(1, 2)), Fraction(1, 32))

    @override_settings(CSG_DEFAULT_LADDER='1/4,1/16')
    def test_ladder_defaults_to_setting(self):
        result = approx_limit_ladder(constant_game(Fraction(1, 2)), "s", None, {"s": 1}, self.eps)
        self.assertEqual([p.lam for p in result.points], [Fraction(1, 4), Fraction(1, 16)])
        value = approx_parity(parity_cycle([0]), "s0", self.eps, mode="ladder")
        self.assertLessEqual(abs(value - 1), self.eps)

    @override_settings(CSG_EXACT_MAX_STATES=2)
    def test_exact_cap(self):
        game = big_match()
        with self.assertRaises(ExactModeCapExceeded):
            approx_limit(game, "play", None, {s: 1 for s in game.states}, self.eps)

    def test_ladder_must_decrease(self):
        game = constant_game(Fraction(1, 2))
        with self.assertRaisesMessage(ValueError, "strictly decreasing"):
            approx_limit_ladder(game, "s", None, {"s": 1}, self.eps, [Fraction(1, 4), Fraction(1, 2)])

    def test_richardson_clamps(self):
        self.assertEqual(richardson([(Fraction(1, 2), Fraction(0)), (Fraction(1, 4), Fraction(1))]), 1)
        self.assertEqual(richardson([(Fraction(1, 2), Fraction(1, 3))]), Fraction(1, 3))


class ParityTests(SimpleTestCase):
    eps = Fraction(1, 8)

    def single(self, priority):
        return make_game(["s"], ["a"], ["b"], {("s", "a", "b"): {"s": 1}}, priorities={"s": priority})

    def test_single_even_state(self):
        rewards, chi = parity_to_limit(self.single(0))
        self.assertEqual(set(rewards.values()), {Fraction(1)})
        self.assertEqual(chi, {"s": 1})
        self.assertLessEqual(abs(approx_parity(self.single(0), "s", self.eps) - 1), self.eps)

    def test_single_odd_state(self):
        self.assertLessEqual(approx_parity(self.single(1), "s", self.eps), self.eps)

    def test_self_loop_priority_two(self):
        self.assertLessEqual(abs(approx_parity(self.single(2), "s", self.eps) - 1), self.eps)

    def test_odd_minimum_on_cycle(self):
        game = parity_cycle([1, 2])
        for s in game.states:
            self.assertLessEqual(approx_parity(game, s, self.eps), self.eps)

    def test_all_even(self):
        game = parity_cycle([2, 0])
        for s in game.states:
            self.assertLessEqual(abs(approx_parity(game, s, self.eps) - 1), self.eps)

    def test_outermost_ordering_matches_play_analysis(self):
        game = parity_cycle([0, 1])
        self.assertEqual(turn_based_parity_value(game)["s0"], 1)
        outermost = approx_parity(game, "s0", self.eps, ordering="outermost")
        innermost = approx_parity(game, "s0", self.eps, ordering="innermost")
        self.assertLessEqual(abs(outermost - 1), self.eps)
        self.assertGreater(abs(innermost - 1), self.eps)

    def test_unused_priorities_are_skipped(self):
        game = parity_cycle([3, 0, 3])
        _, chi = parity_to_limit(game, ordering="outermost")
        self.assertEqual(chi, {"s0": 2, "s1": 1, "s2": 2})
        self.assertEqual(turn_based_parity_value(game)["s0"], 1)
        self.assertLessEqual(abs(approx_parity(game, "s0", self.eps) - 1), self.eps)

    @override_settings(CSG_PARITY_ORDERING="innermost")
    def test_ordering_setting(self):
        _, chi = parity_to_limit(parity_cycle([0, 1]))
        self.assertEqual(chi, {"s0": 2, "s1": 1})

    def test_missing_priorities(self):
        with self.assertRaises(GameValidationError):
            parity_to_limit(constant_game(Fraction(1, 2)))

    def test_matches_enumeration_oracle_on_turn_based_corpus(self):
        rng = Random(41)
        for _ in range(10):
            game = random_turn_based_parity(rng, 2, max_priority=1)
            self.assertTrue(is_turn_based(game))
            expected = turn_based_parity_value(game)
            for s in game.states:
                self.assertLessEqual(abs(approx_parity(game, s, self.eps) - expected[s]), self.eps)

    def test_three_state_turn_based_ladder(self):
        game = make_game(
            ["s0", "win", "lose"], ["a0", "a1"], ["b0", "b1"],
            {
                **{("s0", "a0", b): {"win": Fraction(1, 2), "lose": Fraction(1, 2)} for b in ("b0", "b1")},
                **{("s0", "a1", b): {"s0": 1} for b in ("b0", "b1")},
                **{("win", a, b): {"win": 1} for a in ("a0", "a1") for b in ("b0", "b1")},
                **{("lose", a, b): {"lose": 1} for a in ("a0", "a1") for b in ("b0", "b1")},
            },
            priorities={"s0": 1, "win": 0, "lose": 1},
        )
        expected = turn_based_parity_value(game)
        self.assertEqual(expected["s0"], Fraction(1, 2))
        value = approx_parity(game, "s0", self.eps, mode="ladder", ladder=LADDER)
        self.assertLessEqual(abs(value - expected["s0"]), self.eps)

    def test_chain_parity_probability(self):
        mc = InducedMC(
            ("s", "good", "bad"),
            {"s": (Fraction(0), Fraction(1, 3), Fraction(2, 3)),
             "good": (Fraction(0), Fraction(1), Fraction(0)),
             "bad": (Fraction(0), Fraction(0), Fraction(1))},
            {s: Fraction(0) for s in ("s", "good", "bad")},
            {},
        )
        probs = mc_parity_probability(mc, {"s": 0, "good": 2, "bad": 3})
        self.assertEqual(probs, {"s": Fraction(1, 3), "good": 1, "bad": 0})

    def test_concurrent_game_rejected_by_oracle(self):
        game = replace(big_match(), priorities={"play": 1, "win": 0, "lose": 1})
        self.assertFalse(is_turn_based(game))
        with self.assertRaises(GameValidationError):
            turn_based_parity_value(game)
