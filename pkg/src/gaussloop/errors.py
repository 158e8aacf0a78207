"""
Exceptions for gaussloop.

Every error raised by the package derives from GaussLoopError so that the
command-line front end can render it as a structured diagnostic.
"""


class GaussLoopError(Exception):
    """Base class for all package errors."""


class ConfigError(GaussLoopError):
    """Invalid value in the environment or .env configuration."""


class UsageError(GaussLoopError):
    """Invalid command-line arguments or generator parameters."""


# Model errors

class ModelError(GaussLoopError):
    """Invalid model structure or parameters."""


class UnknownNode(ModelError):
    pass


class DuplicateNode(ModelError):
    pass


class DanglingNeighbor(ModelError):
    pass


class ShapeMismatch(ModelError):
    """Cavity covariance block does not match the node neighborhood."""


# Linear algebra

class NotPositiveDefinite(GaussLoopError):
    """Symmetric factorization of a precision matrix failed."""


class PrefixNotPositiveDefinite(NotPositiveDefinite):
    """A growth prefix of the model is not positive definite."""


# Oracle

class DimensionTooLarge(GaussLoopError):
    pass


class NonIntegrable(GaussLoopError):
    pass


class OracleInapplicable(GaussLoopError):
    pass


class QuadratureNotConverged(GaussLoopError):
    pass


# Iterations

class NonConvergence(GaussLoopError):
    """An iteration hit max_iters before the residual dropped below tol."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NegativeCavityPrecision(GaussLoopError):
    """1 - s_i * alpha became non-positive for a message update."""


class CavityGraphNotConverged(NonConvergence):
    pass


class DegenerateMean(GaussLoopError):
    """BP mean of the central node stays at zero even after a field shift."""


# Expectation propagation

class NonPositiveCavityVariance(GaussLoopError):
    pass


class CavityVarianceNegative(GaussLoopError):
    pass


class QuadraticSolveDegenerate(GaussLoopError):
    pass
