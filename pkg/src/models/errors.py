"""
Exception hierarchy for the toolkit.

Every error raised on purpose by the numerical services derives from
ToolkitError. The CLI maps the three families onto exit codes:
ConfigError -> 2, HypothesisError -> 3, NumericalError -> 4.
"""

from typing import Any, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ToolkitError, ValueError):
    """
    Invalid run configuration.

    Attributes:
        errors: Every problem found while validating the document
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("Invalid configuration: " + "; ".join(self.errors))


class HypothesisError(ToolkitError, ValueError):
    """A hypothesis of an existence result does not hold (alpha = 0, a1 = b1 = 0, ...)."""


class NumericalError(ToolkitError):
    """Base class for failures of a numerical procedure."""


class IntegrationError(NumericalError):
    """Time integration failed (step-size underflow, blow-up, non-finite state)."""

    def __init__(self, message: str, t: Optional[float] = None):
        self.t = t
        super().__init__(message if t is None else f"{message} (t={t:.17g})")


class IntegrationQualityError(NumericalError):
    """A computed monodromy matrix violates det(M) = 1 beyond the allowed drift."""


class SingularJacobianError(NumericalError):
    """Newton iteration met a Jacobian that cannot produce a step."""

    def __init__(self, message: str, iterate: Any = None):
        self.iterate = iterate
        super().__init__(message)


class ConvergenceError(NumericalError):
    """
    An iteration hit its cap without meeting the tolerance.

    Attributes:
        best: Best iterate found (lowest residual)
        residual: Residual norm at the best iterate
        iterations: Number of iterations performed
    """

    def __init__(self, message: str, best: Any = None, residual: float = float("nan"),
                 iterations: int = 0):
        self.best = best
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class BracketError(NumericalError):
    """A bisection bracket does not contain a sign change."""
