class FpArithmeticError(ValueError):
    """Negative result, division by zero, precision mismatch or an input outside 𝓕(ℓ)."""


class ChainNotAbsorbingError(ValueError):
    """Some transient state of a reachability chain never reaches an absorbing state."""
