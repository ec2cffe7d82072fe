"""Exception types shared across the package."""


class NovsweepError(Exception):
    """Base class for every error raised by the package."""


class DivisionByZero(NovsweepError, ZeroDivisionError):
    pass


class DivisionByNonUnit(NovsweepError, ArithmeticError):
    """Raised when a divisor is not invertible in Z((t))."""


class ParseError(NovsweepError, ValueError):
    pass


class StructureError(NovsweepError, ValueError):
    """Well-formed input that is not a strictly upper-triangular, index-sorted complex."""


class InadmissibleInput(NovsweepError, ValueError):
    """Structurally valid input that fails the square-zero or entry-type checks."""


class GenerationFailed(NovsweepError, RuntimeError):
    pass


class InternalInvariantViolation(NovsweepError, AssertionError):
    pass


class UndefinedDifferential(NovsweepError, LookupError):
    pass


class PageInconsistency(InternalInvariantViolation):
    pass


class ReducedMatrixInvalid(InternalInvariantViolation):
    pass


class IndexOutOfRange(NovsweepError, IndexError):
    pass
