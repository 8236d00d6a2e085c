"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class RegimeError(ParameterError):
    """An operation was called outside the exponent regime it is defined for."""


class GridError(ValueError):
    """Grid too small or function/grid mismatch."""


class ProjectionError(RuntimeError):
    """No admissible scaling parameter could be bracketed.

    ``trace`` holds the scanned ``(t, value)`` pairs, when available.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
