"""Exception types shared across the pipeline."""


class NewslensError(Exception):
    """Base class for all package errors."""


class MalformedFeed(NewslensError):
    """Feed document is not well-formed XML or lacks a channel/feed root."""


class NoContent(NewslensError):
    """Page extraction produced zero non-empty paragraphs."""


class StorageUnavailable(NewslensError):
    """The backing database cannot be reached or written."""


class ConstraintViolation(NewslensError):
    """A write would break referential integrity or a uniqueness rule."""


class InvalidFilter(NewslensError):
    """A search filter is malformed (unknown source, from > to, bad scope)."""


class UnknownExport(NewslensError):
    """Export token was never issued."""


class ExpiredExport(NewslensError):
    """Export token was issued but has passed its lifetime."""


class AdapterTimeout(NewslensError):
    """External tagger produced no response within its timeout."""


class AdapterProtocolError(NewslensError):
    """External tagger response is not a valid mention document."""


class SpanMismatch(NewslensError):
    """A tagger reported a span whose text differs from the mention surface."""


class UnsortedInput(NewslensError):
    """Mentions handed to resolution are not in document order."""


class OutOfRange(NewslensError):
    """A compound score lies outside [-1, 1]."""


class EmptyInput(NewslensError):
    """An aggregate was requested over an empty collection."""


class UnknownEntity(NewslensError):
    """No entity with the requested id exists."""
