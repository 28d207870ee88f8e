"""
Exception hierarchy for dcov-bounds.
"""

from typing import Optional


class DCovBoundsError(Exception):
    """Base class for every error raised by this package."""


class SampleError(DCovBoundsError, ValueError):
    """A sample matrix violates its invariants."""


class EmptySampleError(SampleError):
    """The sample has no observations or no components."""


class NonFiniteEntryError(SampleError):
    """The sample holds a NaN or infinite entry."""

    def __init__(self, row: int, column: int, value: float):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"non-finite entry {value!r} at row {row}, column {column}")


class InvalidBoxError(DCovBoundsError, ValueError):
    """A bounds box is malformed (lo > hi, dim < 1, non-finite limits)."""


class SizeMismatchError(DCovBoundsError, ValueError):
    """Paired inputs do not have the same number of observations."""


class SampleOutsideBoxError(DCovBoundsError, ValueError):
    """A sample entry lies outside the declared box."""

    def __init__(self, row: int, column: int, value: float, lo: float, hi: float,
                 label: str = "sample"):
        self.row = row
        self.column = column
        self.value = value
        self.lo = lo
        self.hi = hi
        self.label = label
        super().__init__(
            f"{label} entry {value!r} at row {row}, column {column} "
            f"is outside the box [{lo!r}, {hi!r}]"
        )


class BadSpecError(DCovBoundsError, ValueError):
    """A sampler specification cannot be honoured."""


class ConfigError(DCovBoundsError, ValueError):
    """A campaign configuration is malformed."""


class MalformedRecordError(DCovBoundsError, ValueError):
    """A recorded campaign failure cannot be replayed."""


class DatasetParseError(DCovBoundsError, ValueError):
    """A CSV cell or row could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, cell: Optional[str] = None):
        self.line = line
        self.column = column
        self.cell = cell
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
            location += ": "
        super().__init__(f"{location}{message}")


class CampaignError(DCovBoundsError):
    """A replicate failed inside a campaign; carries the spec id."""

    def __init__(self, spec_id: str, replicate: int, cause: Exception):
        self.spec_id = spec_id
        self.replicate = replicate
        self.cause = cause
        super().__init__(f"spec {spec_id!r}, replicate {replicate}: {cause}")


class OutputWriteError(DCovBoundsError, OSError):
    """A report or sample file could not be written."""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")
