from fractions import Fraction
from math import lcm
from typing import List, Sequence, Tuple, Union

from .exceptions import ShapeError, SingularMatrixError
from .models import RatMatrix


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[int]], int]:
    """Scale every row by the lcm of its denominators; return the integer rows and the product of the scales."""
    scaled = []
    scale = 1
    for row in rows:
        k = lcm(*(x.denominator for x in row))
        scaled.append([int(x * k) for x in row])
        scale *= k
    return scaled, scale


def _bareiss(mat: List[List[int]], width: int) -> Tuple[int, bool]:
    """
    Fraction-free elimination in place on a square block plus trailing columns.

    Returns (sign of the row permutation, whether every pivot was found).
    The divisions by the previous pivot are exact.
    """
    n = len(mat)
    prev_pivot = 1
    sign = 1
    for k in range(n):
        pivot_row = k
        while mat[pivot_row][k] == 0:
            pivot_row += 1
            if pivot_row == n:
                # No non-zero pivot, the determinant is zero.
                return sign, False
        if pivot_row != k:
            mat[pivot_row], mat[k] = mat[k], mat[pivot_row]
            sign = -sign
        pivot = mat[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, width):
                mat[i][j] = (pivot * mat[i][j] - mat[i][k] * mat[k][j]) // prev_pivot
            mat[i][k] = 0
        prev_pivot = pivot
    return sign, True


def bareiss_det(m: RatMatrix) -> Fraction:
    if not m.is_square:
        raise ShapeError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    mat, scale = _integer_rows(m.as_rows())
    sign, full_rank = _bareiss(mat, m.cols)
    if not full_rank:
        return Fraction(0)
    return Fraction(sign * mat[-1][-1], scale)


def signed_minor_sum(m: RatMatrix) -> Fraction:
    """
    S(M) = Σ (−1)^(i+j) det(M with row i and column j deleted), the entry sum of adj(M).

    By the matrix determinant lemma det(M + 11ᵀ) = det(M) + 1ᵀ adj(M) 1.
    """
    if not m.is_square:
        raise ShapeError(f"signed minor sum of a non-square {m.rows}x{m.cols} matrix")
    ones = RatMatrix(m.rows, m.cols, tuple(Fraction(1) for _ in m.entries))
    return bareiss_det(m + ones) - bareiss_det(m)


def solve_linear(m: RatMatrix, rhs: Sequence[Fraction]) -> List[Fraction]:
    """Unique exact solution of m·x = rhs via fraction-free elimination and back-substitution."""
    if not m.is_square:
        raise ShapeError(f"cannot solve a non-square {m.rows}x{m.cols} system")
    if len(rhs) != m.rows:
        raise ShapeError(f"right-hand side of length {len(rhs)} does not fit {m.rows} rows")
    n = m.rows
    augmented = [row + [Fraction(b)] for row, b in zip(m.as_rows(), rhs)]
    mat, _ = _integer_rows(augmented)
    _, full_rank = _bareiss(mat, n + 1)
    if not full_rank:
        raise SingularMatrixError(f"singular {n}x{n} system")

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(mat[i][n]) - sum((mat[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        x[i] = acc / mat[i][i]

    if m.apply(x) != [Fraction(b) for b in rhs]:
        raise ArithmeticError("back-substitution check failed")
    return x


def bit_size(q: Union[int, Fraction]) -> int:
    """
    bit(k) = ⌈log₂(k+1)⌉ for positive integers; bit(k₁/k₂) = bit(k₁) + bit(k₂) for rationals.

    Rationals are taken in lowest terms with |k₁|; the rational 0 = 0/1 has size 1.
    """
    if isinstance(q, Fraction):
        return abs(q.numerator).bit_length() + q.denominator.bit_length()
    if q <= 0:
        raise ValueError(f"bit size is defined for positive integers, got {q}")
    # ⌈log₂(k+1)⌉ is the binary length of k
    return q.bit_length()


def det_lower_bound(p: RatMatrix, discounts: Sequence[Fraction]) -> Tuple[Fraction, Fraction]:
    """
    det(Id − ((1−Λ)1ᵀ)⊙P) for a stochastic P, together with the bound (min Λ)^k it must reach.
    """
    if not p.is_square or len(discounts) != p.rows:
        raise ShapeError("discount vector must match a square stochastic matrix")
    k = p.rows
    system = RatMatrix.from_rows([
        [int(i == j) - (1 - discounts[i]) * p.at(i, j) for j in range(k)]
        for i in range(k)
    ])
    return bareiss_det(system), min(discounts) ** k
