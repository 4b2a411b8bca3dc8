from fractions import Fraction
from random import Random
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from .exceptions import EnumerationCapExceeded, GameValidationError
from .models import DiscountSpec, GameSpec, MixedStationary
from .samples import (
    big_match,
    constant_game,
    make_game,
    matching_pennies,
    random_game,
    random_discount,
    random_strategy,
    swap_players,
)
from .services import (
    collapse_mdp,
    dirac_strategy,
    ensure_enumerable,
    enumerate_pure,
    induce_mc,
    induce_mdp,
    play_prefix_payoff,
    uniform_strategy,
    validate_discount,
    validate_game,
)


class GameValidationTests(SimpleTestCase):
    def test_minimal_game_accepted(self):
        game = constant_game(Fraction(1, 2))
        self.assertIs(validate_game(game), game)
        self.assertEqual(game.n, 1)
        self.assertEqual(game.m, 1)

    def test_row_sum_rejected(self):
        game = GameSpec(("s",), ("a",), ("b",), {("s", "a", "b"): (Fraction(3, 4),)}, {("s", "a", "b"): Fraction(1, 2)})
        with self.assertRaisesMessage(GameValidationError, "row sum"):
            validate_game(game)

    def test_reward_range_rejected(self):
        game = GameSpec(("s",), ("a",), ("b",), {("s", "a", "b"): (Fraction(1),)}, {("s", "a", "b"): Fraction(3, 2)})
        with self.assertRaisesMessage(GameValidationError, "reward range"):
            validate_game(game)

    def test_missing_triple_rejected(self):
        game = GameSpec(("s",), ("a", "a2"), ("b",), {("s", "a", "b"): (Fraction(1),)}, {("s", "a", "b"): Fraction(0)})
        with self.assertRaisesMessage(GameValidationError, "missing transition at (s, a2, b)"):
            validate_game(game)

    def test_empty_sets_rejected(self):
        with self.assertRaisesMessage(GameValidationError, "empty state set"):
            validate_game(GameSpec((), ("a",), ("b",), {}))
        with self.assertRaisesMessage(GameValidationError, "empty action set"):
            validate_game(GameSpec(("s",), (), ("b",), {}))

    def test_parity_instance_needs_no_rewards(self):
        game = make_game(["s"], ["a"], ["b"], {("s", "a", "b"): {"s": 1}}, priorities={"s": 2})
        self.assertEqual(game.reward("s", "a", "b"), 0)

    def test_discount_factor_range(self):
        game = constant_game(Fraction(1))
        with self.assertRaises(GameValidationError):
            validate_discount(game, DiscountSpec((Fraction(0),), {"s": 1}))
        with self.assertRaises(GameValidationError):
            validate_discount(game, DiscountSpec((Fraction(1, 2),), {"s": 2}))


class InducedModelTests(SimpleTestCase):
    def setUp(self):
        self.rng = Random(7)

    def test_dirac_mdp_rows_match_game(self):
        game = big_match()
        mdp = induce_mdp(game, dirac_strategy(game, 1, "T"))
        self.assertEqual(mdp.controlling_player, 2)
        for s in game.states:
            for b in game.actions2:
                self.assertEqual(mdp.transition[(s, b)], game.transition[(s, "T", b)])

    def test_uniform_average_of_two_rows(self):
        game = make_game(
            ["s", "t"], ["a1", "a2"], ["b"],
            {("s", "a1", "b"): {"t": 1}, ("s", "a2", "b"): {"s": 1},
             ("t", "a1", "b"): {"t": 1}, ("t", "a2", "b"): {"t": 1}},
            {(s, a, "b"): 0 for s in ("s", "t") for a in ("a1", "a2")},
        )
        mdp = induce_mdp(game, uniform_strategy(game, 1))
        self.assertEqual(mdp.transition[("s", "b")][1], Fraction(1, 2))

    def test_mdp_matches_direct_summation(self):
        game = random_game(self.rng, 2, 2)
        sigma = random_strategy(self.rng, game, 1)
        mdp = induce_mdp(game, sigma)
        for s in game.states:
            for b in game.actions2:
                for t in range(game.n):
                    expected = sum(
                        (sigma.rows[s][i] * game.transition[(s, a, b)][t] for i, a in enumerate(game.actions1)),
                        Fraction(0),
                    )
                    self.assertEqual(mdp.transition[(s, b)][t], expected)

    def test_matching_pennies_uniform_stage_reward(self):
        game = matching_pennies()
        mc = induce_mc(game, uniform_strategy(game, 1), uniform_strategy(game, 2))
        self.assertEqual(mc.stage_reward["s"], Fraction(1, 2))

    def test_mc_matches_double_sum_and_composition(self):
        for _ in range(10):
            game = random_game(self.rng, 3, 2)
            disc = random_discount(self.rng, game)
            sigma = random_strategy(self.rng, game, 1)
            tau = random_strategy(self.rng, game, 2)
            mc = induce_mc(game, sigma, tau, disc)
            for s in game.states:
                self.assertEqual(sum(mc.transition[s]), 1)
                for t in range(game.n):
                    expected = sum(
                        (x * y * game.transition[(s, a, b)][t]
                         for x, a in zip(sigma.rows[s], game.actions1)
                         for y, b in zip(tau.rows[s], game.actions2)),
                        Fraction(0),
                    )
                    self.assertEqual(mc.transition[s][t], expected)
            self.assertEqual(collapse_mdp(induce_mdp(game, sigma, disc), tau), mc)
            self.assertEqual(collapse_mdp(induce_mdp(game, tau, disc), sigma), mc)

    def test_shape_mismatch(self):
        game = matching_pennies()
        bad = MixedStationary(1, {"s": (Fraction(1),)})
        with self.assertRaisesMessage(GameValidationError, "strategy shape"):
            induce_mdp(game, bad)


class EnumerationTests(SimpleTestCase):
    def test_counts_and_order(self):
        rng = Random(1)
        self.assertEqual(len(enumerate_pure(random_game(rng, 1, 2), 1)), 2)
        profiles = enumerate_pure(random_game(rng, 2, 2), 1)
        self.assertEqual([p.key for p in profiles], [("a0", "a0"), ("a0", "a1"), ("a1", "a0"), ("a1", "a1")])
        profiles = enumerate_pure(random_game(rng, 3, 3), 2)
        self.assertEqual(len(profiles), 27)
        self.assertEqual(len({p.key for p in profiles}), 27)

    @override_settings(CSG_ENUMERATION_CAP=4)
    def test_cap(self):
        game = random_game(Random(2), 3, 2)
        with self.assertRaises(EnumerationCapExceeded):
            ensure_enumerable(game, 1)


class PlayPrefixTests(SimpleTestCase):
    def test_prefix_weights(self):
        payoff, mass = play_prefix_payoff([Fraction(1), Fraction(0), Fraction(1)], [Fraction(1, 2)] * 3)
        self.assertEqual(payoff, Fraction(1, 2) + Fraction(1, 8))
        self.assertEqual(mass, Fraction(1, 8))

    def test_constant_reward_prefix_approaches_reward(self):
        c = Fraction(2, 5)
        payoff, mass = play_prefix_payoff([c] * 20, [Fraction(1, 4)] * 20)
        self.assertEqual(payoff + c * mass, c)


class SwapPlayersTests(SimpleTestCase):
    def test_roles_exchanged_and_rewards_complemented(self):
        game = big_match()
        swapped = swap_players(game)
        self.assertEqual(swapped.actions1, game.actions2)
        self.assertEqual(swapped.reward("play", "L", "T"), 0)
        self.assertEqual(swapped.transition[("play", "R", "T")], game.transition[("play", "T", "R")])
        self.assertEqual(swap_players(swapped), game)


class LoggingConfigTests(SimpleTestCase):
    def test_every_local_app_logs_to_file(self):
        loggers = settings.LOGGING['loggers']
        for app in settings.INSTALLED_APPS:
            if app == 'rest_framework':
                continue
            self.assertIn(app, loggers)
            self.assertIn('file', loggers[app]['handlers'])
