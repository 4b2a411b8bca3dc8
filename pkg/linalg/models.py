from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .exceptions import ShapeError


@dataclass(frozen=True)
class RatMatrix:
    """Dense row-major matrix of exact rationals."""
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ShapeError(f"matrix must be at least 1x1, got {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        if not rows:
            raise ShapeError("matrix must have at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged rows")
        return cls(len(rows), width, tuple(Fraction(x) for r in rows for x in r))

    @classmethod
    def identity(cls, k: int) -> "RatMatrix":
        return cls.from_rows([[int(i == j) for j in range(k)] for i in range(k)])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(self.at(i, j) for i in range(self.rows))

    def as_rows(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_rows([list(self.column(j)) for j in range(self.cols)])

    def minor(self, i: int, j: int) -> "RatMatrix":
        """Delete row i and column j."""
        return RatMatrix.from_rows([
            [x for c, x in enumerate(self.row(r)) if c != j]
            for r in range(self.rows) if r != i
        ])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "RatMatrix":
        cols = list(cols)
        return RatMatrix.from_rows([[self.at(i, j) for j in cols] for i in rows])

    def with_column(self, j: int, values: Sequence[Fraction]) -> "RatMatrix":
        if len(values) != self.rows:
            raise ShapeError(f"column of length {len(values)} does not fit {self.rows} rows")
        rows = self.as_rows()
        for i, v in enumerate(values):
            rows[i][j] = v
        return RatMatrix.from_rows(rows)

    def apply(self, vector: Sequence[Fraction]) -> List[Fraction]:
        if len(vector) != self.cols:
            raise ShapeError(f"vector of length {len(vector)} does not fit {self.cols} columns")
        return [sum((a * x for a, x in zip(self.row(i), vector)), Fraction(0)) for i in range(self.rows)]

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return RatMatrix.from_rows([
            [sum((self.at(i, k) * other.at(k, j) for k in range(self.cols)), Fraction(0)) for j in range(other.cols)]
            for i in range(self.rows)
        ])

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("cannot add matrices of different shapes")
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))
