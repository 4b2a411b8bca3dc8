from fractions import Fraction
from random import Random
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from .exceptions import ShapeError, SingularMatrixError
from .models import RatMatrix
from .services import bareiss_det, bit_size, det_lower_bound, signed_minor_sum, solve_linear

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=7)


def square_matrices(max_size=4):
    return st.integers(1, max_size).flatmap(
        lambda k: st.lists(st.lists(small_fractions, min_size=k, max_size=k), min_size=k, max_size=k)
    ).map(RatMatrix.from_rows)


def laplace_det(m: RatMatrix) -> Fraction:
    if m.rows == 1:
        return m.at(0, 0)
    return sum(((-1) ** j * m.at(0, j) * laplace_det(m.minor(0, j)) for j in range(m.cols)), Fraction(0))


def adjugate_entry_sum(m: RatMatrix) -> Fraction:
    if m.rows == 1:
        return Fraction(1)
    return sum(
        ((-1) ** (i + j) * laplace_det(m.minor(i, j)) for i in range(m.rows) for j in range(m.cols)),
        Fraction(0),
    )


def random_matrix(rng: Random, k: int, den: int = 9) -> RatMatrix:
    return RatMatrix.from_rows([[Fraction(rng.randint(-20, 20), rng.randint(1, den)) for _ in range(k)] for _ in range(k)])


class DeterminantTests(SimpleTestCase):
    def test_small_cases(self):
        self.assertEqual(bareiss_det(RatMatrix.from_rows([[1, 2], [3, 4]])), -2)
        self.assertEqual(bareiss_det(RatMatrix.identity(3)), 1)
        self.assertEqual(bareiss_det(RatMatrix.from_rows([[0, 1], [1, 0]])), -1)
        self.assertEqual(bareiss_det(RatMatrix.from_rows([[1, 2], [2, 4]])), 0)

    def test_rational_entries(self):
        m = RatMatrix.from_rows([[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 4), Fraction(1, 5)]])
        self.assertEqual(bareiss_det(m), Fraction(1, 10) - Fraction(1, 12))

    def test_non_square(self):
        with self.assertRaises(ShapeError):
            bareiss_det(RatMatrix.from_rows([[1, 2, 3], [4, 5, 6]]))

    def test_matches_cofactor_expansion(self):
        rng = Random(11)
        for trial in range(200):
            k = 1 + trial % 6
            m = random_matrix(rng, k)
            self.assertEqual(bareiss_det(m), laplace_det(m))

    def test_singular_with_late_zero_pivot(self):
        m = RatMatrix.from_rows([[1, 1, 1], [1, 1, 2], [2, 2, 3]])
        self.assertEqual(bareiss_det(m), 0)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(st.integers(1, 4).flatmap(lambda k: st.tuples(
        st.lists(st.lists(small_fractions, min_size=k, max_size=k), min_size=k, max_size=k),
        st.lists(st.lists(small_fractions, min_size=k, max_size=k), min_size=k, max_size=k),
    )))
    def test_multiplicative(self, pair):
        a, b = (RatMatrix.from_rows(rows) for rows in pair)
        self.assertEqual(bareiss_det(a @ b), bareiss_det(a) * bareiss_det(b))


class SignedMinorSumTests(SimpleTestCase):
    def test_one_by_one(self):
        self.assertEqual(signed_minor_sum(RatMatrix.from_rows([[Fraction(5, 7)]])), 1)

    def test_two_by_two(self):
        a, b, c, d = Fraction(3), Fraction(-1, 2), Fraction(2, 3), Fraction(7)
        self.assertEqual(signed_minor_sum(RatMatrix.from_rows([[a, b], [c, d]])), a + d - b - c)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(square_matrices())
    def test_equals_adjugate_entry_sum(self, m):
        self.assertEqual(signed_minor_sum(m), adjugate_entry_sum(m))


class SolveLinearTests(SimpleTestCase):
    def test_identity(self):
        b = [Fraction(1, 3), Fraction(-2), Fraction(5, 4)]
        self.assertEqual(solve_linear(RatMatrix.identity(3), b), b)

    def test_diagonal(self):
        x = solve_linear(RatMatrix.from_rows([[2, 0], [0, 4]]), [Fraction(1), Fraction(1)])
        self.assertEqual(x, [Fraction(1, 2), Fraction(1, 4)])

    def test_needs_row_swap(self):
        x = solve_linear(RatMatrix.from_rows([[0, 1], [1, 0]]), [Fraction(2), Fraction(3)])
        self.assertEqual(x, [Fraction(3), Fraction(2)])

    def test_random_residual_zero(self):
        rng = Random(5)
        solved = 0
        while solved < 20:
            m = random_matrix(rng, 5)
            if bareiss_det(m) == 0:
                continue
            b = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(5)]
            self.assertEqual(m.apply(solve_linear(m, b)), b)
            solved += 1

    def test_singular(self):
        with self.assertRaises(SingularMatrixError):
            solve_linear(RatMatrix.from_rows([[1, 2], [2, 4]]), [Fraction(1), Fraction(2)])


class BitSizeTests(SimpleTestCase):
    def test_integers(self):
        self.assertEqual(bit_size(1), 1)
        self.assertEqual(bit_size(7), 3)
        self.assertEqual(bit_size(8), 4)

    def test_rationals(self):
        self.assertEqual(bit_size(Fraction(3, 5)), 5)
        self.assertEqual(bit_size(Fraction(6, 10)), 5)
        self.assertEqual(bit_size(Fraction(-3, 5)), 5)

    def test_rejects_non_positive_integers(self):
        for k in (0, -3):
            with self.assertRaises(ValueError):
                bit_size(k)


class DeterminantLowerBoundTests(SimpleTestCase):
    def test_random_stochastic_matrices(self):
        rng = Random(3)
        for _ in range(30):
            k = rng.randint(1, 4)
            rows = []
            for _ in range(k):
                weights = [rng.randint(0, 6) for _ in range(k)]
                weights[rng.randrange(k)] += 1
                rows.append([Fraction(w, sum(weights)) for w in weights])
            discounts = [Fraction(rng.randint(1, 8), 8) for _ in range(k)]
            det, bound = det_lower_bound(RatMatrix.from_rows(rows), discounts)
            self.assertGreaterEqual(det, bound)
            self.assertGreater(bound, 0)
