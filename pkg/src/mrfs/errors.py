"""Exception hierarchy.

User and data problems (bad flags, malformed files, out-of-domain values)
carry exit code 1; violated internal invariants (shuffle bugs, corrupted
intermediate state) carry exit code 2 so scripts can tell them apart.
"""

from __future__ import annotations


class MrfsError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidArgumentError(MrfsError):
    """A parameter is out of its documented range (e.g. L > candidate count)."""


class IngestionError(MrfsError):
    """A dataset file could not be parsed; message carries the location."""


class DomainViolationError(MrfsError):
    """A categorical code is not a member of its declared domain."""


class FeatureNotFoundError(MrfsError):
    """A requested feature index or name does not exist in the dataset."""


class UnsupportedDataError(MrfsError):
    """The score function cannot be applied to this kind of data."""


class StructuralError(MrfsError):
    """An internal invariant was violated; indicates a pipeline bug."""

    exit_code = 2


class JobError(MrfsError):
    """A mapper or reducer failed; pinpoints the offending record."""

    exit_code = 2

    def __init__(self, stage: str, partition_id: int, record_index: int | None, cause: BaseException):
        self.stage = stage
        self.partition_id = partition_id
        self.record_index = record_index
        self.cause = cause
        where = f"partition {partition_id}"
        if record_index is not None:
            where += f", record {record_index}"
        super().__init__(f"{stage} failed at {where}: {cause!r}")

    def __reduce__(self):
        return (JobError, (self.stage, self.partition_id, self.record_index, self.cause))
