class PreconditionError(ValueError):
    """An input violates the documented precondition of an operation."""


class NonConvergenceError(ArithmeticError):
    """A refinement loop hit its depth cap before meeting the tolerance."""
