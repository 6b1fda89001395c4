"""Exception hierarchy shared across the simulator."""


class EcsError(Exception):
    """Base class for all simulator errors."""


class ShapeMismatchError(EcsError, ValueError):
    """Two states or operators disagree on mode count or cutoff."""


class NormalizationError(EcsError, ValueError):
    """A state that must be normalized is not."""


class DegenerateStateError(EcsError, ValueError):
    """A superposition cancels to (numerically) zero norm."""


class BudgetError(EcsError, MemoryError):
    """Requested dimension exceeds the configured allocation budget."""

    def __init__(self, message, dimension=None, limit=None):
        super().__init__(message)
        self.dimension = dimension
        self.limit = limit


class NumericError(EcsError, ArithmeticError):
    """Numerical failure: non-finite values, step underflow, etc."""
