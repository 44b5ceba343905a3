"""Exception types shared across the package."""


class MagflowError(Exception):
    """Base class for all package-specific failures."""


class UnsupportedQueryError(MagflowError):
    """Pointwise geometry was requested from a model that has none."""


class ResolutionError(MagflowError):
    """Quadrature grid refinement hit its cap before the error tolerance."""


class IntegrationFailure(MagflowError):
    """Adaptive step control underflowed; carries the last good time."""

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class InsufficientDataError(MagflowError):
    """Too few samples to build the requested interpolant."""


class ConjugatePointError(MagflowError):
    """A boundary-value solve is singular because of a conjugate point."""

    def __init__(self, message, conjugate_time=None):
        super().__init__(message)
        self.conjugate_time = conjugate_time


class NumericalInconsistencyError(MagflowError):
    """Two independent computations of the same quantity disagree."""


class ConfigError(MagflowError):
    """A run configuration failed validation; names the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
