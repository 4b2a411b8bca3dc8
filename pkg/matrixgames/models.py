from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from linalg.models import RatMatrix


@dataclass(frozen=True)
class MatrixGame:
    """Zero-sum matrix game; the row player maximizes, the column player minimizes."""
    payoff: RatMatrix

    @classmethod
    def from_rows(cls, rows) -> "MatrixGame":
        return cls(RatMatrix.from_rows(rows))


@dataclass(frozen=True)
class GameSolution:
    value: Fraction
    row_strategy: Tuple[Fraction, ...]
    col_strategy: Tuple[Fraction, ...]
