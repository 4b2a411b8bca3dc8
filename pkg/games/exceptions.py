class GameValidationError(ValueError):
    """A game, discount or strategy violates its model invariants."""


class EnumerationCapExceeded(RuntimeError):
    """More pure stationary strategies than CSG_ENUMERATION_CAP allows."""
