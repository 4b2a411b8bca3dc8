from fractions import Fraction
from typing import List, Sequence, Tuple
import logging

logger = logging.getLogger(__name__)


class SimplexTableau:
    """
    Compact exact simplex tableau for max cᵀy subject to A·y ≤ b, y ≥ 0, with b ≥ 0.

    Columns hold the nonbasic variables and rows the basic ones. Variables
    0..n-1 are the structural ones and n..n+m-1 the slacks, so the slack
    basis is feasible from the start. Entering and leaving variables follow
    Bland's rule, which rules out cycling.
    """

    def __init__(self, a: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]):
        self.m = len(a)
        self.n = len(c)
        self.A = [[Fraction(x) for x in row] for row in a]
        self.b = [Fraction(x) for x in b]
        self.c = [Fraction(x) for x in c]
        self.objective = Fraction(0)
        self.nb_vars = list(range(self.n))
        self.b_vars = list(range(self.n, self.n + self.m))
        self.pivots = 0

    def pivot(self, i: int, j: int):
        piv = self.A[i][j]
        delta = self.c[j] / piv
        self.objective += delta * self.b[i]
        for l in range(self.n):
            self.c[l] -= delta * self.A[i][l]
        self.c[j] = -delta
        for l in range(self.n):
            self.A[i][l] = 1 / piv if l == j else self.A[i][l] / piv
        self.b[i] /= piv
        for k in range(self.m):
            if k != i:
                f = self.A[k][j]
                if f == 0:
                    continue
                for l in range(self.n):
                    self.A[k][l] = -f / piv if l == j else self.A[k][l] - f * self.A[i][l]
                self.b[k] -= f * self.b[i]
        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def bland_primal_step(self) -> str:
        try:
            _, j = min((self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0)
        except ValueError:
            return 'optimal'
        try:
            _, _, i = min((self.b[i] / self.A[i][j], self.b_vars[i], i)
                          for i in range(self.m)
                          if self.A[i][j] > 0)
        except ValueError:
            return 'unbounded'
        self.pivot(i, j)
        return 'go_on'

    def bland_primal(self) -> str:
        while True:
            ret = self.bland_primal_step()
            if ret in ('optimal', 'unbounded'):
                logger.debug(f"Simplex {ret} after {self.pivots} pivots")
                return ret

    def primal_solution(self) -> List[Fraction]:
        y = [Fraction(0)] * self.n
        for i, v in enumerate(self.b_vars):
            if v < self.n:
                y[v] = self.b[i]
        return y

    def dual_solution(self) -> List[Fraction]:
        """Shadow prices of the m constraints, read off the slack columns."""
        x = [Fraction(0)] * self.m
        for j, v in enumerate(self.nb_vars):
            if v >= self.n:
                x[v - self.n] = -self.c[j]
        return x

    def solve(self) -> Tuple[Fraction, List[Fraction], List[Fraction]]:
        status = self.bland_primal()
        if status != 'optimal':
            raise ArithmeticError(f"simplex ended {status}")
        return self.objective, self.primal_solution(), self.dual_solution()
