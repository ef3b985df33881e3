"""Exception types shared across the package."""


class RoundVolError(Exception):
    """Base class for all roundvol errors."""


class ParameterError(RoundVolError, ValueError):
    """Invalid parameter value (non-positive grid step, bad family parameters, ...)."""


class DomainError(RoundVolError, ValueError):
    """Evaluation requested outside the model's open state interval."""


class RangeError(RoundVolError, ValueError):
    """Inverse natural-scale transform requested outside the range of the transform."""


class LevelError(RoundVolError, ValueError):
    """Wavelet level too fine for the available sample size."""


class ResolutionError(RoundVolError, ValueError):
    """Fine simulation grid too coarse for the requested coefficient levels."""

    def __init__(self, message, required_grid=None):
        super().__init__(message)
        self.required_grid = required_grid


class ExitedPathError(RoundVolError, RuntimeError):
    """A simulated path left the state interval; downstream use is refused."""


class ExperimentAbortedError(RoundVolError, RuntimeError):
    """Monte Carlo experiment aborted (e.g. excessive path exit rate)."""
