# magblock/core/errors.py
# Exception hierarchy shared by the core modules and the CLI exit-code mapping.

from __future__ import annotations


class MagblockError(Exception):
    """Base class for every error raised by magblock."""


class ConfigError(MagblockError, ValueError):
    """Invalid run configuration or command-line usage."""


class DimensionError(MagblockError, ValueError):
    """Operator dimensions do not conform, or a truncation is too small."""


class ParameterError(MagblockError, ValueError):
    """A SystemParams invariant or an operation precondition is violated."""


class ComputationError(MagblockError, RuntimeError):
    """A numerical step failed on otherwise valid input."""


class DegenerateDenominatorError(ComputationError):
    """A closed-form denominator fell below the degeneracy floor."""


class SingularSystemError(ComputationError):
    """A linear system could not be solved."""


class IntegrationError(ComputationError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:.6g}/kappa)")
        self.time = time


class SteadyStateError(ComputationError):
    def __init__(self, message: str, rcond: float | None = None):
        if rcond is not None:
            message = f"{message} (reciprocal condition estimate {rcond:.3e})"
        super().__init__(message)
        self.rcond = rcond


class UnpopulatedModeError(ComputationError):
    """The normalising occupation of a mode is below the floor, g2 is undefined."""


class NoInteriorMinimumError(ComputationError):
    """The search landscape has no minimum strictly inside the bounds."""
