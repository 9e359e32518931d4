"""Exceptions raised across the pipeline."""


class PassPatternError(Exception):
    """Base class for every error the pipeline raises on purpose."""


class SchemaError(PassPatternError):
    def __init__(self, message: str, record: int | None = None):
        super().__init__(message)
        self.record = record


class EventRecordError(PassPatternError, ValueError):
    """A record has a value that cannot be turned into a PassEvent."""

    def __init__(self, message: str, record: int, line: int | None = None):
        where = f"record {record}" if line is None else f"record {record} (line {line})"
        super().__init__(f"{where}: {message}")
        self.record = record
        self.line = line


class OutOfFieldError(PassPatternError, ValueError):
    pass


class SizeError(PassPatternError):
    pass


class DegenerateInput(PassPatternError):
    pass


class EmptyInput(PassPatternError):
    pass


class InvariantViolation(PassPatternError):
    """A produced match breaks one of the PatternMatch invariants."""


class MissingArtifact(PassPatternError):
    """A pipeline stage needs the output of an earlier stage that is not there."""
