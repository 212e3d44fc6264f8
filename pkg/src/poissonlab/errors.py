"""Exception types shared across the package."""


class PoissonLabError(Exception):
    """Base class for all package errors."""


class ResolutionMismatchError(PoissonLabError, ValueError):
    """Grid resolutions are incompatible (one must divide the other)."""


class DomainError(PoissonLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConfigurationError(PoissonLabError, ValueError):
    """A configuration object is internally inconsistent."""


class EvaluationError(PoissonLabError, ArithmeticError):
    """A pointwise map produced a non-finite value during integration."""


class BudgetError(PoissonLabError, RuntimeError):
    """An exact computation exceeds its work budget; use Monte Carlo instead."""
