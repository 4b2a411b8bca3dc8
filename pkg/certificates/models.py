from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from games.models import MixedStationary, PureProfile
from .exceptions import CertificateError


@dataclass(frozen=True)
class ValueCertificate:
    """Two candidate stationary strategies and a grid point α = j·2^(−(κ+2)) claimed near the value."""
    sigma: MixedStationary
    tau: MixedStationary
    j: int
    kappa: int
    state: Optional[str] = None

    def __post_init__(self):
        if self.kappa < 0:
            raise CertificateError(f"kappa must be nonnegative, got {self.kappa}")
        if not 0 <= self.j <= 1 << (self.kappa + 2):
            raise CertificateError(f"grid index j={self.j} outside [0, 2^{self.kappa + 2}]")

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.j, 1 << (self.kappa + 2))

    @property
    def eps(self) -> Fraction:
        return Fraction(1, 1 << self.kappa)


@dataclass(frozen=True)
class BestResponse:
    """Exact optimal values of an MDP and a pure stationary strategy attaining them in every state."""
    values: Dict[str, Fraction]
    profile: PureProfile


@dataclass(frozen=True)
class CertificateCheck:
    alpha: Fraction
    eps: Fraction
    v_sigma: Fraction
    v_tau: Fraction
    lower_ok: bool
    upper_ok: bool

    @property
    def accepted(self) -> bool:
        return self.lower_ok and self.upper_ok

    @classmethod
    def build(cls, alpha: Fraction, eps: Fraction, v_sigma: Fraction, v_tau: Fraction) -> "CertificateCheck":
        return cls(
            alpha=alpha,
            eps=eps,
            v_sigma=v_sigma,
            v_tau=v_tau,
            lower_ok=alpha - 3 * eps / 4 <= v_sigma - eps / 4,
            upper_ok=alpha + 3 * eps / 4 >= v_tau + eps / 4,
        )
