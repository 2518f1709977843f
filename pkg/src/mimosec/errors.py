"""Exception types shared by all mimosec modules."""


class MimosecError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MimosecError, ValueError):
    """An input matrix or index has an incompatible shape."""


class ConfigurationError(MimosecError, ValueError):
    """A parameter violates its documented domain (antenna budget, power split, ...)."""


class SingularMatrixError(MimosecError, ArithmeticError):
    """A matrix that must be invertible (or full rank) is numerically singular."""


class DegenerateInputError(MimosecError, ValueError):
    """An input is degenerate (e.g. zero-norm precoder in the power normalizer)."""


class DegenerateOrderingError(MimosecError, ArithmeticError):
    """A user ordering produced a zero diagonal entry in the effective channel."""


class ValidationError(MimosecError, ValueError):
    """A structured input fails its contract (non-Hermitian covariance, length mismatch)."""
