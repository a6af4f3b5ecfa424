"""Exception types raised across the toolkit.

Everything derives from :class:`QubofsError` so callers can catch the whole
family; most classes also subclass ``ValueError`` so they behave sensibly
for callers that only know the standard hierarchy.
"""


class QubofsError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------- dataset

class DatasetError(QubofsError, ValueError):
    """Base class for ingest and dataset-validation failures."""


class MissingColumnError(DatasetError):
    pass


class RaggedRowError(DatasetError):
    """A data row has a different cell count than the header."""

    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} cells, got {got}")
        self.row = row


class UnparseableCellError(DatasetError):
    """A cell could not be parsed under the column's (inferred) kind."""

    def __init__(self, row: int, column: str, message: str):
        super().__init__(f"row {row}, column {column!r}: {message}")
        self.row = row
        self.column = column


class EmptyDataError(DatasetError):
    pass


class TooFewRecordsError(DatasetError):
    pass


class ClassTooSmallError(DatasetError):
    pass


class BadFractionsError(DatasetError):
    pass


# ------------------------------------------------------------------ stats

class NonFiniteInputError(QubofsError, ValueError):
    pass


class ConstantColumnError(QubofsError, ValueError):
    pass


class LengthMismatchError(QubofsError, ValueError):
    pass


class ZeroExpectedCellError(QubofsError, ValueError):
    pass


class SingleGroupError(QubofsError, ValueError):
    pass


class DegenerateInputError(QubofsError, ValueError):
    pass


class MeasureNotApplicableError(QubofsError, ValueError):
    pass


# ------------------------------------------------------------------- qubo

class AlphaOutOfRangeError(QubofsError, ValueError):
    pass


class NonBinaryEntryError(QubofsError, ValueError):
    pass


# ----------------------------------------------------------------- solver

class TooLargeError(QubofsError, ValueError):
    """Instance exceeds the exhaustive solver's variable cap."""


class UnknownBackendError(QubofsError, KeyError):
    pass


# ----------------------------------------------------- selection / search

class KTargetOutOfRangeError(QubofsError, ValueError):
    pass


class IndexOutOfRangeError(QubofsError, IndexError):
    pass


class CardinalityMissError(QubofsError, ValueError):
    """The alpha search missed the requested feature count by too much."""


# ------------------------------------------------------------------- eval

class EmptyTrainError(QubofsError, ValueError):
    pass


class SchemaMismatchError(QubofsError, ValueError):
    pass


# ---------------------------------------------------------------- reports

class MalformedReportError(QubofsError, ValueError):
    pass
