"""Exception types shared across the package."""


class KronStatsError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(KronStatsError, ValueError):
    """Operands disagree on dimension, order, or layout."""


class BudgetError(KronStatsError, MemoryError):
    """An operation would allocate more tensor entries than the configured budget."""


class NumericalError(KronStatsError, ArithmeticError):
    """A numerical precondition failed, e.g. a covariance that is not positive definite."""


class AccuracyError(KronStatsError, ArithmeticError):
    """A quadrature self-check detected that the returned value would be unreliable."""


class InputError(KronStatsError, ValueError):
    """Malformed user-supplied data: CSV cells, JSON schemas, or configuration."""


class EstimationError(KronStatsError, ValueError):
    """The sample cannot support the requested estimate."""
