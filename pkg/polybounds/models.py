from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exceptions import PolynomialError

Exponents = Tuple[int, ...]


@dataclass(frozen=True)
class MultiPoly:
    """Sparse integer polynomial in x₁,…,x_k keyed by exponent vectors; zero coefficients are never stored."""
    num_vars: int
    terms: Dict[Exponents, int]
    degrees: Tuple[int, ...]

    @classmethod
    def from_terms(cls, num_vars: int, terms: Mapping[Sequence[int], int],
                   degrees: Optional[Sequence[int]] = None) -> "MultiPoly":
        if num_vars < 1:
            raise PolynomialError(f"need at least one variable, got {num_vars}")
        clean = {}
        for exps, coef in terms.items():
            exps = tuple(exps)
            if len(exps) != num_vars or any(e < 0 for e in exps):
                raise PolynomialError(f"exponent vector {exps} does not fit {num_vars} variables")
            if coef:
                clean[exps] = clean.get(exps, 0) + int(coef)
        clean = {e: c for e, c in clean.items() if c}
        used = tuple(max((e[i] for e in clean), default=0) for i in range(num_vars))
        if degrees is None:
            degrees = used
        degrees = tuple(degrees)
        if len(degrees) != num_vars or any(u > d for u, d in zip(used, degrees)):
            raise PolynomialError(f"exponents {used} exceed the declared degrees {degrees}")
        return cls(num_vars, clean, degrees)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    @property
    def coefficient_bits(self) -> int:
        """B: bit-size of the largest coefficient magnitude."""
        return max((abs(c).bit_length() for c in self.terms.values()), default=0)


@dataclass(frozen=True)
class SampleReport:
    b1: int
    samples: int
    violations: List[Tuple[Fraction, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations
