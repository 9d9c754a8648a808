"""Exceptions raised by robust_meas."""


class RobustMeasError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(RobustMeasError, ValueError):
    """Lengths or matrix shapes do not agree."""


class IndexRangeError(RobustMeasError, IndexError):
    """An index (codeword, observable, symbol, position) is out of range."""


class DomainError(RobustMeasError, ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedDistanceError(DomainError):
    """Minimum distance requested for a code with a single codeword."""


class UnsupportedFieldError(DomainError):
    """Linear construction requested over a non-prime alphabet."""


class RankError(DomainError):
    """Generators of a linear code are linearly dependent."""


class CardinalityError(DomainError):
    """Codeword count and projector count differ."""


class CodeInvariantError(DomainError):
    """A codeword list violates the code invariants."""


class POVMValidationError(DomainError):
    """A projector list is not a projective POVM within tolerance."""


class IndeterminateClassificationError(DomainError):
    """Phase discrimination is impossible (zero coherent amplitude)."""


class NotApplicableError(DomainError):
    """The requested quantity does not exist for this parameter family."""


class ParseError(RobustMeasError, ValueError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
