"""
Exception types raised by the ssc package.
"""


class SSCError(Exception):
    """Base class for all ssc errors."""


class ZeroColumnError(SSCError, ValueError):
    """A column that must be normalized has (near) zero norm."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"Column {column} has zero norm and cannot be normalized")


class ConfigInvalidError(SSCError, ValueError):
    """A configuration value violates its preconditions."""


class DimensionInvalidError(SSCError, ValueError):
    """A requested dimension or count is out of range."""


class DimensionMismatchError(SSCError, ValueError):
    """Two inputs disagree on a shared size (e.g. labels vs points)."""


class LengthMismatchError(SSCError, ValueError):
    """Label sequences of different lengths were compared."""


class NotSymmetricError(SSCError, ValueError):
    """A matrix expected to be symmetric is not."""


class DatasetTooSmallError(SSCError, ValueError):
    """Self-expression needs at least two points."""


class FormatError(SSCError, ValueError):
    """A DMAT or labels file does not conform to its format."""

    def __init__(self, path, message: str, line: int = None):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class NoCandidateError(SSCError):
    """No neighbor candidate with a positive score is left."""


class PipelineError(SSCError):
    """A pipeline stage failed; carries the stage name and the data source."""

    def __init__(self, stage: str, source: str, cause: Exception):
        self.stage = stage
        self.source = source
        self.cause = cause
        super().__init__(f"[{stage}] {source}: {cause}")
