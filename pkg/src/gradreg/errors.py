"""Exception types shared across the package."""


class GradRegError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(GradRegError, ValueError):
    """A point's dimension does not match the object it is used with."""


class ConfigurationError(GradRegError, ValueError):
    """Invalid experiment or problem configuration (bad value, unknown key)."""


class PreconditionError(GradRegError, ValueError):
    """An operation was called outside its admissible parameter range."""


class UnsupportedInstanceError(GradRegError, NotImplementedError):
    """The problem instance does not support the requested operation."""


class ProxToleranceError(GradRegError, RuntimeError):
    """The inner proximal solve could not certify the requested tolerance.

    Carries the best certified residual found so the caller can decide
    whether to accept it.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best certified residual: {residual:.3e})")
        self.residual = residual
