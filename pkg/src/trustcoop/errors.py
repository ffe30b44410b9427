"""Exception types raised across the package."""


class TrustCoopError(Exception):
    """Base class for package errors."""


class DegenerateInputError(TrustCoopError, ValueError):
    """An input vector or matrix is degenerate (e.g. zero basis vector)."""


class InvalidInputError(TrustCoopError, ValueError):
    """An input violates a structural precondition (shape, symmetry, range)."""


class InfeasibleQoSError(TrustCoopError, ValueError):
    """The QoS target exceeds what Ru2 can reach with full-power MRT."""


class Infeasible(TrustCoopError):
    """A quadratic subproblem has an empty feasible set."""


class NumericalError(TrustCoopError, ArithmeticError):
    """An iterative numerical routine failed to reach its target."""


class ConfigError(TrustCoopError, ValueError):
    """Bad experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
