"""Exception types raised by the numerical engine."""


class FreeSDError(Exception):
    """Base class for all errors raised by :mod:`freesd`."""


class NonConvergenceError(FreeSDError, RuntimeError):
    """An iterative scheme stopped before reaching its tolerance.

    ``estimate`` carries the best error estimate (or residual) reached.
    """

    def __init__(self, message, estimate=float("nan")):
        super().__init__(message)
        self.estimate = estimate


class BracketError(NonConvergenceError):
    """No sign change of ``F_k - 1`` could be found inside the admissible range."""


class DivergentIntegralError(FreeSDError, ValueError):
    """A moment or tail integral of ``k`` is infinite."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class MonotonicityError(FreeSDError, RuntimeError):
    """Boundary values ``xi = P_k(x)`` failed to increase strictly along a grid."""


class MassDeficitError(FreeSDError, RuntimeError):
    """The computed density does not integrate to one within tolerance."""

    def __init__(self, message, mass=float("nan")):
        super().__init__(message)
        self.mass = mass


class ConfigError(FreeSDError, ValueError):
    """Malformed or out-of-range run configuration."""
