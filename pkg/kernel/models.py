from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from games.models import MixedStationary, PureProfile
from matrixgames.models import MatrixGame


@dataclass(frozen=True)
class KernelEntry:
    """Cramer numerator ∇^s and denominator ∇ of the discounted payoff under a pure profile pair."""
    nabla_s: Fraction
    nabla: Fraction

    @property
    def payoff(self) -> Fraction:
        return self.nabla_s / self.nabla

    def w(self, z: Fraction) -> Fraction:
        return self.nabla_s - z * self.nabla


@dataclass(frozen=True)
class KernelTable:
    """
    Kernel entries of one state for every pair of pure stationary profiles.

    Rows and columns follow enumerate_pure order, so W(z) for any z is
    materialized from this table without recomputing determinants.
    """
    state: str
    rows: Tuple[PureProfile, ...]
    cols: Tuple[PureProfile, ...]
    entries: Tuple[Tuple[KernelEntry, ...], ...]

    def at(self, z: Fraction) -> MatrixGame:
        return MatrixGame.from_rows([[e.w(z) for e in row] for row in self.entries])

    @property
    def min_nabla(self) -> Fraction:
        return min(e.nabla for row in self.entries for e in row)


@dataclass(frozen=True)
class OracleResult:
    """Certified value-iteration output: intervals, last Bellman image and stage-game strategies."""
    intervals: Dict[str, Tuple[Fraction, Fraction]]
    values: Dict[str, Fraction]
    sigma: MixedStationary
    tau: MixedStationary
    iterations: int
