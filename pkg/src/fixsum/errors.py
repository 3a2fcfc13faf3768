"""Exception hierarchy shared by all modules."""


class FixsumError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(FixsumError, ValueError):
    pass


class PreconditionError(FixsumError, ValueError):
    pass


class DegenerateSimplexError(FixsumError, ValueError):
    pass


class InfeasibleRegionError(FixsumError, ValueError):
    """The constraint set admits no point of the simplex."""


class NumericError(FixsumError, ArithmeticError):
    """A numerical breakdown (tiny pivot, failed certificate, ...)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonTerminationError(FixsumError, RuntimeError):
    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SamplingFailureError(FixsumError, RuntimeError):
    def __init__(self, message, acceptance_rate=None):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate
