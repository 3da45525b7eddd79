"""Error taxonomy shared by every module.

Two families matter to callers. ConfigurationError means the request itself
is malformed (bad exponent range, mismatched grids, invalid tolerances) and
maps to process exit code 1 in the command line driver. NumericalFailure
means a numerical procedure could not reach its stated tolerance and maps to
exit code 2; subclasses name the procedure family that failed.
"""


class ConfigurationError(ValueError):
    """A request violates a documented precondition."""


class NumericalFailure(RuntimeError):
    """A numerical procedure failed to meet its contract.

    The optional attributes record what failed and how close it got, so the
    command line driver can report the failing operation by name.
    """

    def __init__(self, message, operation=None, residual=None):
        super().__init__(message)
        self.operation = operation
        self.residual = residual


class QuadratureError(NumericalFailure):
    """Adaptive quadrature exhausted its subdivision budget."""


class ConvergenceError(NumericalFailure):
    """An iteration stopped before reaching its tolerance."""


class TruncationError(NumericalFailure):
    """A series truncation error estimate exceeds the requested tolerance."""


class HypothesisViolation(NumericalFailure):
    """Input data violates a mathematical hypothesis of the formula in use."""
