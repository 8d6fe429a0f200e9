"""Exception types shared across the package."""


class QsvdsimError(Exception):
    """Base class for all package-specific errors."""


class MatrixFormatError(QsvdsimError, ValueError):
    """Input file does not parse under the declared format."""


class DegenerateInputError(QsvdsimError, ValueError):
    """Input is structurally valid but degenerate (zero matrix, empty table, ...)."""


class EmptyVocabularyError(DegenerateInputError):
    """All words were filtered out while building a contingency table."""


class NumericError(QsvdsimError, ValueError):
    """Non-finite values where finite reals are required."""


class ResolutionError(QsvdsimError, ValueError):
    """Requested rounding resolution leaves zero bits."""


class NormalizationError(QsvdsimError, ValueError):
    """A unit vector was required but not supplied."""


class UndefinedStateError(QsvdsimError, ValueError):
    """A state-vector operation received a zero vector."""


class UnreachableTargetError(QsvdsimError, ValueError):
    """Requested cumulative-variance target cannot be met by the sample."""


class EmptyRetentionError(QsvdsimError, ValueError):
    """No singular value survives the requested threshold."""


class InfeasibleBudgetError(QsvdsimError, ValueError):
    """An error budget is too small to invert into a positive parameter."""


class StratificationError(QsvdsimError, ValueError):
    """A class has too few samples for the requested fold count."""


class IncompleteParamsError(QsvdsimError, ValueError):
    """A runtime-parameter record is missing fields needed by a cost formula."""
