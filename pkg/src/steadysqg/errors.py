"""Exception hierarchy shared by the numerical modules and the CLI."""


class SteadySQGError(Exception):
    """Base class for all package errors."""


class ResolutionError(SteadySQGError, ValueError):
    """Grid too coarse to represent the requested modes."""


class AliasingError(SteadySQGError, ValueError):
    """Requested mode count cannot be recovered from the grid without aliasing."""


class DomainError(SteadySQGError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(SteadySQGError, ValueError):
    """Input violates a documented precondition."""


class InvalidConfigError(SteadySQGError, ValueError):
    """Inconsistent solver, kernel or evolution configuration."""


class SingularModeError(SteadySQGError, ZeroDivisionError):
    """Inverting a multiplier on a mode where its symbol vanishes."""


class SingularityError(SteadySQGError, ValueError):
    """Evaluation requested exactly at a kernel or profile singularity."""


class NumericalError(SteadySQGError, ArithmeticError):
    """A computation produced non-finite values."""


class DegenerateInputError(SteadySQGError, ValueError):
    """Input is numerically zero where a normalisation needs a positive mass."""


class HolderFitError(SteadySQGError, ValueError):
    """The endpoint Hölder fit window is unusable."""


class NonConvergenceError(SteadySQGError, RuntimeError):
    """Fixed-point iteration hit ``max_iter`` without meeting the tolerance.

    Attributes:
        last_iterate: the final iterate as a ``SineSeries``.
        history: update norms, one per iteration.
        partial: a ``SolutionBundle`` assembled from the last iterate with
            ``converged=False``; lets callers persist diagnostics.
    """

    def __init__(self, message, last_iterate=None, history=(), partial=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.history = list(history)
        self.partial = partial


class InstabilityError(SteadySQGError, RuntimeError):
    """Time integration blew up.

    Attributes:
        time: simulated time at which growth exceeded the threshold.
        history: rows of (t, drift, sup_norm) recorded so far.
    """

    def __init__(self, message, time, history=()):
        super().__init__(message)
        self.time = time
        self.history = list(history)
