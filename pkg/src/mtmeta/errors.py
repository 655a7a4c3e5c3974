"""Exception hierarchy shared by all modules."""


class MetaEvalError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(MetaEvalError, ValueError):
    """Malformed or empty input data."""


class AlignmentError(InvalidInputError):
    """Segment files or score vectors that do not line up."""


class RangeError(InvalidInputError):
    """A value outside its documented range (e.g. a DA score above 100)."""


class DuplicateKeyError(InvalidInputError):
    pass


class MissingDataError(MetaEvalError, LookupError):
    pass


class InsufficientDataError(MetaEvalError, ValueError):
    """Too few observations for the requested statistic."""


class UndefinedCorrelationError(MetaEvalError, ArithmeticError):
    """Pearson's r is undefined because one input has zero variance."""


class InvalidMatrixError(MetaEvalError, ValueError):
    """Correlations that cannot come from a positive semi-definite matrix."""


class UndefinedMetricError(InvalidInputError):
    """A metric cannot be computed on the given statistics (e.g. empty reference)."""
