class ShapeError(ValueError):
    """Matrix dimensions do not fit the operation."""


class SingularMatrixError(ValueError):
    """No unique solution: elimination found no pivot."""
