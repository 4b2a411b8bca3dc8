class PolynomialError(ValueError):
    """Zero polynomial where a nonzero one is required, arity mismatch or exponents above the declared degrees."""
