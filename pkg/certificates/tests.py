from fractions import Fraction
from random import Random
from django.test import SimpleTestCase, override_settings

from games.exceptions import EnumerationCapExceeded
from games.models import InducedMDP, MixedStationary
from games.samples import matching_pennies, random_discount, random_game, random_strategy, single_discount
from games.services import dirac_strategy, induce_mdp, pure_to_mixed, uniform_strategy
from kernel.services import discounted_payoff, value_iteration
from linalg.exceptions import ShapeError
from .exceptions import CertificateError
from .models import CertificateCheck, ValueCertificate
from .services import (
    bellman_image,
    bellman_residual,
    best_response,
    best_response_value,
    check_eps_optimal,
    enumerate_mdp_strategies,
    evaluate_certificate,
    mdp_continuity_gap,
    patience,
    patience_threshold,
    prune_strategy,
    verify_certificate,
)

EPS = Fraction(1, 64)


def one_state_mdp(rewards, lam=Fraction(1, 3), player=1):
    actions = tuple(f"a{i}" for i in range(len(rewards)))
    return InducedMDP(
        controlling_player=player,
        states=("s",),
        actions=actions,
        transition={("s", a): (Fraction(1),) for a in actions},
        stage_reward={("s", a): Fraction(r) for a, r in zip(actions, rewards)},
        discount={"s": lam},
    )


def oracle_certificate(game, disc, state, kappa, tol=Fraction(1, 2 ** 14)):
    oracle = value_iteration(game, disc, tol)
    lo, hi = oracle.intervals[state]
    j = round((lo + hi) / 2 * (1 << (kappa + 2)))
    return ValueCertificate(oracle.sigma, oracle.tau, j, kappa, state), oracle


class BestResponseTests(SimpleTestCase):
    def test_single_state_max(self):
        self.assertEqual(best_response_value(one_state_mdp([Fraction(1, 5), Fraction(7, 10)]), "s"), Fraction(7, 10))

    def test_single_state_min_for_player_two(self):
        mdp = one_state_mdp([Fraction(1, 5), Fraction(7, 10)], player=2)
        self.assertEqual(best_response_value(mdp, "s"), Fraction(1, 5))

    def test_constant_rewards(self):
        c = Fraction(3, 11)
        self.assertEqual(best_response_value(one_state_mdp([c, c, c]), "s"), c)

    def test_enumeration_matches_value_iteration(self):
        rng = Random(21)
        for _ in range(10):
            game = random_game(rng, 2, 3)
            disc = random_discount(rng, game, den=4)
            tau = random_strategy(rng, game, 2)
            mdp = induce_mdp(game, tau, disc)
            result = best_response(mdp)
            self.assertEqual(bellman_residual(mdp, result.values), 0)

            payoffs = [
                discounted_payoff(game, disc, "s0", dirac_sigma, tau)
                for dirac_sigma in (
                    pure_to_mixed(game, profile) for profile in enumerate_mdp_strategies(mdp)
                )
            ]
            self.assertEqual(result.values["s0"], max(payoffs))

            v = {s: Fraction(0) for s in mdp.states}
            for _ in range(60):
                v = bellman_image(mdp, v)
            self.assertLess(abs(v["s0"] - result.values["s0"]), Fraction(1, 2 ** 10))

    @override_settings(CSG_ENUMERATION_CAP=2)
    def test_cap(self):
        with self.assertRaises(EnumerationCapExceeded):
            best_response(one_state_mdp([0, 1, Fraction(1, 2)]))


class EpsOptimalTests(SimpleTestCase):
    def setUp(self):
        self.game = matching_pennies()
        self.disc = single_discount(self.game, Fraction(1, 2))

    def test_uniform_is_optimal(self):
        for player in (1, 2):
            self.assertTrue(check_eps_optimal(self.game, self.disc, uniform_strategy(self.game, player),
                                              Fraction(0), {"s": Fraction(1, 2)}))

    def test_pure_strategy_is_exploitable(self):
        strat = dirac_strategy(self.game, 1, "H")
        self.assertFalse(check_eps_optimal(self.game, self.disc, strat, Fraction(1, 4), {"s": Fraction(1, 2)}))

    def test_oracle_strategies_on_random_games(self):
        rng = Random(22)
        for _ in range(10):
            game = random_game(rng, rng.randint(1, 3), 2)
            disc = random_discount(rng, game, d=2, den=4)
            oracle = value_iteration(game, disc, Fraction(1, 2 ** 14))
            ref = {s: (lo + hi) / 2 for s, (lo, hi) in oracle.intervals.items()}
            self.assertTrue(check_eps_optimal(game, disc, oracle.sigma, EPS, ref))
            self.assertTrue(check_eps_optimal(game, disc, oracle.tau, EPS, ref))


class CertificateTests(SimpleTestCase):
    def setUp(self):
        self.game = matching_pennies()
        self.disc = single_discount(self.game, Fraction(1, 2))
        self.sigma = uniform_strategy(self.game, 1)
        self.tau = uniform_strategy(self.game, 2)

    def test_uniform_certificate(self):
        for kappa in (1, 4, 9):
            j = 1 << (kappa + 1)
            cert = ValueCertificate(self.sigma, self.tau, j, kappa, "s")
            self.assertEqual(cert.alpha, Fraction(1, 2))
            self.assertTrue(verify_certificate(self.game, self.disc, "s", cert, Fraction(1, 2 ** kappa)))

    def test_alpha_one_rejected(self):
        cert = ValueCertificate(self.sigma, self.tau, 1 << 6, 4, "s")
        check = evaluate_certificate(self.game, self.disc, "s", cert, Fraction(1, 16))
        self.assertFalse(check.lower_ok)
        self.assertTrue(check.upper_ok)
        self.assertFalse(check.accepted)

    def test_kappa_mismatch(self):
        cert = ValueCertificate(self.sigma, self.tau, 8, 1, "s")
        with self.assertRaises(CertificateError):
            verify_certificate(self.game, self.disc, "s", cert, Fraction(1, 4))

    def test_grid_index_range(self):
        with self.assertRaises(CertificateError):
            ValueCertificate(self.sigma, self.tau, 17, 2)

    def test_swapped_players(self):
        cert = ValueCertificate(self.tau, self.sigma, 2, 0, "s")
        with self.assertRaises(CertificateError):
            verify_certificate(self.game, self.disc, "s", cert, Fraction(1))

    def test_completeness_and_soundness(self):
        rng = Random(23)
        kappa = 6
        eps = Fraction(1, 2 ** kappa)
        grid = 1 << (kappa + 2)
        for _ in range(30):
            game = random_game(rng, rng.randint(1, 2), 2)
            disc = random_discount(rng, game, d=rng.randint(1, 2), den=4)
            state = rng.choice(game.states)
            cert, oracle = oracle_certificate(game, disc, state, kappa)
            check = evaluate_certificate(game, disc, state, cert, eps)
            self.assertTrue(check.accepted)

            lo, hi = oracle.intervals[state]
            for j in range(grid + 1):
                alpha = Fraction(j, grid)
                if CertificateCheck.build(alpha, eps, check.v_sigma, check.v_tau).accepted:
                    self.assertTrue(lo - eps <= alpha <= hi + eps)
            for shift in (-8, 8):
                if 0 <= cert.j + shift <= grid:
                    moved = ValueCertificate(cert.sigma, cert.tau, cert.j + shift, kappa, state)
                    self.assertFalse(verify_certificate(game, disc, state, moved, eps))


class ContinuityTests(SimpleTestCase):
    def mdp(self, rows):
        return InducedMDP(
            controlling_player=1,
            states=("s0", "s1"),
            actions=("a", "b"),
            transition=rows,
            stage_reward={("s0", "a"): Fraction(1), ("s0", "b"): Fraction(0),
                          ("s1", "a"): Fraction(1, 2), ("s1", "b"): Fraction(1, 4)},
            discount={"s0": Fraction(1, 2), "s1": Fraction(3, 4)},
        )

    def rows(self, delta=Fraction(0)):
        return {
            ("s0", "a"): (Fraction(1, 2) - delta, Fraction(1, 2) + delta),
            ("s0", "b"): (Fraction(1), Fraction(0)),
            ("s1", "a"): (Fraction(0), Fraction(1)),
            ("s1", "b"): (Fraction(1, 3), Fraction(2, 3)),
        }

    def test_identical(self):
        first = self.mdp(self.rows())
        self.assertEqual(mdp_continuity_gap(first, first), 0)

    def test_single_row_perturbation(self):
        delta = Fraction(1, 20)
        first, second = self.mdp(self.rows()), self.mdp(self.rows(delta / 2))
        bound = mdp_continuity_gap(first, second)
        self.assertEqual(bound, 2 * delta)
        for s in first.states:
            self.assertLessEqual(abs(best_response_value(first, s) - best_response_value(second, s)), bound)

    def test_random_sweep(self):
        rng = Random(24)
        for _ in range(30):
            game = random_game(rng, 2, 2)
            disc = random_discount(rng, game)
            tau = random_strategy(rng, game, 2)
            other = random_strategy(rng, game, 2)
            first, second = induce_mdp(game, tau, disc), induce_mdp(game, other, disc)
            second = InducedMDP(first.controlling_player, first.states, first.actions,
                                second.transition, first.stage_reward, first.discount)
            bound = mdp_continuity_gap(first, second)
            for s in first.states:
                self.assertLessEqual(abs(best_response_value(first, s) - best_response_value(second, s)), bound)

    def test_shape_mismatch(self):
        first = self.mdp(self.rows())
        other = InducedMDP(2, first.states, first.actions, first.transition, first.stage_reward, first.discount)
        with self.assertRaises(ShapeError):
            mdp_continuity_gap(first, other)


class PatienceTests(SimpleTestCase):
    def test_prune_and_renormalize(self):
        game = matching_pennies()
        strat = uniform_strategy(game, 1)
        skewed = MixedStationary(1, {"s": (Fraction(1, 100), Fraction(99, 100))})
        pruned = prune_strategy(skewed, Fraction(1, 50))
        self.assertEqual(pruned.rows["s"], (Fraction(0), Fraction(1)))
        self.assertEqual(patience(skewed), Fraction(1, 100))
        self.assertEqual(prune_strategy(strat, Fraction(1, 4)), strat)

    def test_pruned_oracle_strategies_stay_optimal(self):
        rng = Random(25)
        for _ in range(10):
            game = random_game(rng, rng.randint(1, 2), 2)
            disc = random_discount(rng, game, den=4)
            oracle = value_iteration(game, disc, Fraction(1, 2 ** 14))
            ref = {s: (lo + hi) / 2 for s, (lo, hi) in oracle.intervals.items()}
            threshold = patience_threshold(disc, game, EPS)
            for strat in (oracle.sigma, oracle.tau):
                pruned = prune_strategy(strat, threshold)
                self.assertGreater(patience(pruned), threshold)
                self.assertTrue(check_eps_optimal(game, disc, pruned, EPS, ref))
