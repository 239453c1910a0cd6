"""Exception types shared across the package."""


class HctError(Exception):
    """Base class for all package errors."""


class ContractViolationError(HctError, ValueError):
    """An argument violates a documented precondition (e.g. level mismatch)."""


class SingularityError(HctError, ZeroDivisionError):
    """Operation undefined at zero (inverse, logarithm, polar form)."""


class BranchError(HctError, ValueError):
    """Principal branch undefined (purely real negative argument)."""


class AccuracyError(HctError, RuntimeError):
    """Requested tolerance could not be reached.

    Carries the best value obtained so far in ``best`` and the error
    estimate in ``err_estimate``.
    """

    def __init__(self, message, best=None, err_estimate=None):
        super().__init__(message)
        self.best = best
        self.err_estimate = err_estimate


class DivergenceError(HctError, ValueError):
    """The integral/series diverges for the requested parameters."""


class ConvergenceDomainError(HctError, ValueError):
    """Point lies outside the convergence half-space / strip."""


class ConditioningError(HctError, RuntimeError):
    """Input is too ill-conditioned to process reliably (e.g. near-degenerate
    root clusters in a rational image denominator)."""


class UnsupportedError(HctError, NotImplementedError):
    """Requested case is outside the implemented scope."""
