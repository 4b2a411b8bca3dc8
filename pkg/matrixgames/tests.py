from fractions import Fraction
from random import Random
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from linalg.services import bareiss_det, signed_minor_sum
from .models import MatrixGame
from .services import certifies, game_value, shapley_snow_witness

entries = st.fractions(min_value=-3, max_value=3, max_denominator=5)
matrices = st.tuples(st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda shape: st.lists(st.lists(entries, min_size=shape[1], max_size=shape[1]),
                           min_size=shape[0], max_size=shape[0])
)


def random_game(rng: Random, rows: int, cols: int) -> MatrixGame:
    return MatrixGame.from_rows([[Fraction(rng.randint(-10, 10), rng.randint(1, 6)) for _ in range(cols)] for _ in range(rows)])


class GameValueTests(SimpleTestCase):
    def test_matching_pennies(self):
        solution = game_value(MatrixGame.from_rows([[1, 0], [0, 1]]))
        self.assertEqual(solution.value, Fraction(1, 2))
        self.assertEqual(solution.row_strategy, (Fraction(1, 2), Fraction(1, 2)))
        self.assertEqual(solution.col_strategy, (Fraction(1, 2), Fraction(1, 2)))

    def test_single_entry(self):
        self.assertEqual(game_value(MatrixGame.from_rows([[Fraction(-7, 3)]])).value, Fraction(-7, 3))

    def test_two_by_two_equalization(self):
        solution = game_value(MatrixGame.from_rows([[3, 1], [0, 2]]))
        self.assertEqual(solution.value, Fraction(3, 2))
        self.assertEqual(solution.row_strategy, (Fraction(1, 2), Fraction(1, 2)))

    def test_saddle_point(self):
        solution = game_value(MatrixGame.from_rows([[4, 2, 3], [1, 0, 5]]))
        self.assertEqual(solution.value, 2)
        self.assertEqual(solution.row_strategy, (1, 0))
        self.assertEqual(solution.col_strategy, (0, 1, 0))

    def test_strategies_certify_random_games(self):
        rng = Random(21)
        for trial in range(200):
            g = random_game(rng, 1 + trial % 6, 1 + (trial // 6) % 6)
            solution = game_value(g)
            self.assertTrue(certifies(g, solution))
            self.assertEqual(sum(solution.row_strategy), 1)
            self.assertEqual(sum(solution.col_strategy), 1)
            self.assertTrue(all(p >= 0 for p in solution.row_strategy + solution.col_strategy))

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(matrices, entries, st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4))
    def test_shift_and_scale(self, rows, c, k):
        value = game_value(MatrixGame.from_rows(rows)).value
        shifted = game_value(MatrixGame.from_rows([[x + c for x in r] for r in rows])).value
        scaled = game_value(MatrixGame.from_rows([[x * k for x in r] for r in rows])).value
        self.assertEqual(shifted, value + c)
        self.assertEqual(scaled, value * k)

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(matrices, st.data())
    def test_monotone(self, rows, data):
        bumped = [[x + data.draw(st.fractions(min_value=0, max_value=2, max_denominator=3)) for x in r] for r in rows]
        self.assertLessEqual(game_value(MatrixGame.from_rows(rows)).value, game_value(MatrixGame.from_rows(bumped)).value)


class ShapleySnowTests(SimpleTestCase):
    def test_single_entry(self):
        self.assertEqual(shapley_snow_witness(MatrixGame.from_rows([[5]])), ((0,), (0,)))

    def test_matching_pennies_uses_full_matrix(self):
        self.assertEqual(shapley_snow_witness(MatrixGame.from_rows([[1, 0], [0, 1]])), ((0, 1), (0, 1)))

    def test_ratio_equals_value(self):
        rng = Random(4)
        for _ in range(50):
            g = random_game(rng, 3, 3)
            rows, cols = shapley_snow_witness(g)
            sub = g.payoff.submatrix(rows, cols)
            self.assertEqual(bareiss_det(sub) / signed_minor_sum(sub), game_value(g).value)
