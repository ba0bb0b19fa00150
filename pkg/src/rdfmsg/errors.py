"""Exception types shared across the package."""

from __future__ import annotations

import enum


class RdfMessageError(Exception):
    """Base class for every error raised by rdfmsg."""


class MixedScope(RdfMessageError, ValueError):
    """Input blank nodes already belong to two different messages."""


class InvalidBase(RdfMessageError, ValueError):
    """A skolemization base is not an absolute IRI."""


class ErrorKind(enum.Enum):
    UNEXPECTED_TOKEN = "UnexpectedToken"
    BAD_IRI = "BadIri"
    BAD_LITERAL = "BadLiteral"
    VERSION_MISSING = "VersionMissing"
    VERSION_UNSUPPORTED = "VersionUnsupported"
    PREDICATE_BLANK_NODE = "PredicateBlankNode"


class MessageSyntaxError(RdfMessageError, ValueError):
    """Malformed message-aware document.

    ``line`` and ``column`` are 1-based; ``offset`` is the absolute byte
    offset of the offending token.
    """

    def __init__(self, kind: ErrorKind, text: str, line: int = 1, column: int = 1, offset: int = 0):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column
        self.offset = offset
        super().__init__(f"{line}:{column}: {kind.value}: {text}")


class LogError(RdfMessageError):
    """Base class for message log failures."""


class AlreadyExists(LogError, FileExistsError):
    pass


class NotFound(LogError, FileNotFoundError):
    pass


class IndexCorrupt(LogError):
    pass


class OutOfRange(LogError, IndexError):
    pass


class ProfileError(RdfMessageError):
    """Raised while extracting or comparing profile instants.

    ``seq`` is filled in when the failure can be pinned to a message position.
    """

    seq: int | None = None


class AmbiguousTimestamp(ProfileError, ValueError):
    pass


class BadDatetime(ProfileError, ValueError):
    pass


class UnorderedInput(ProfileError, ValueError):
    pass
