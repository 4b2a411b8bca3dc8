from fractions import Fraction
from itertools import combinations
from typing import Optional, Tuple
import logging

from linalg.services import bareiss_det, signed_minor_sum
from .models import GameSolution, MatrixGame
from .simplex import SimplexTableau

logger = logging.getLogger(__name__)


def _saddle_point(g: MatrixGame) -> Optional[GameSolution]:
    rows = g.payoff.as_rows()
    row_min = [min(r) for r in rows]
    col_max = [max(r[j] for r in rows) for j in range(g.payoff.cols)]
    maximin, minimax = max(row_min), min(col_max)
    if maximin != minimax:
        return None
    i = row_min.index(maximin)
    j = col_max.index(minimax)
    return GameSolution(
        value=maximin,
        row_strategy=tuple(Fraction(int(k == i)) for k in range(g.payoff.rows)),
        col_strategy=tuple(Fraction(int(k == j)) for k in range(g.payoff.cols)),
    )


def certifies(g: MatrixGame, solution: GameSolution) -> bool:
    """Row strategy guarantees ≥ value against every column and the column strategy ≤ value against every row."""
    m = g.payoff
    row_payoffs = [sum((p * m.at(i, j) for i, p in enumerate(solution.row_strategy)), Fraction(0)) for j in range(m.cols)]
    col_payoffs = m.apply(solution.col_strategy)
    return min(row_payoffs) >= solution.value and max(col_payoffs) <= solution.value


def game_value(g: MatrixGame) -> GameSolution:
    """
    Exact minimax value and optimal mixed strategies.

    After shifting every entry to at least 1 the value is positive, and
    max 1ᵀy s.t. A·y ≤ 1, y ≥ 0 has optimum 1/v; y·v is the column
    strategy and the dual x·v the row strategy.
    """
    solution = _saddle_point(g)
    if solution is None:
        m = g.payoff
        shift = 1 - min(m.entries)
        a = [[x + shift for x in row] for row in m.as_rows()]
        tableau = SimplexTableau(a, [Fraction(1)] * m.rows, [Fraction(1)] * m.cols)
        total, y, x = tableau.solve()
        v = 1 / total
        solution = GameSolution(
            value=v - shift,
            row_strategy=tuple(xi * v for xi in x),
            col_strategy=tuple(yj * v for yj in y),
        )
        logger.debug(f"Solved {m.rows}x{m.cols} game in {tableau.pivots} pivots")

    if not certifies(g, solution):
        raise ArithmeticError("matrix game strategies do not certify the value")
    return solution


def shapley_snow_witness(g: MatrixGame) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Square submatrix M₀ with S(M₀) ≠ 0 and val(g) = det(M₀)/S(M₀).

    Submatrices are tried by increasing size, rows then columns in
    lexicographic order. Exponential; meant for diagnostics and tests.
    """
    value = game_value(g).value
    m = g.payoff
    for k in range(1, min(m.rows, m.cols) + 1):
        for rows in combinations(range(m.rows), k):
            for cols in combinations(range(m.cols), k):
                sub = m.submatrix(rows, cols)
                s = signed_minor_sum(sub)
                if s != 0 and bareiss_det(sub) / s == value:
                    return rows, cols
    raise ArithmeticError("no Shapley-Snow kernel found")
