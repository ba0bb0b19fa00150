"""Events produced by the incremental message parsers."""

from __future__ import annotations

from dataclasses import dataclass

from .message import Message

VERSION = "1.2-messages"


@dataclass(frozen=True)
class MessageReady:
    """A complete message; ``start``/``end`` are absolute byte offsets (end exclusive)."""

    message: Message
    start: int
    end: int


@dataclass(frozen=True)
class NeedMoreInput:
    pass


@dataclass(frozen=True)
class EndOfLog:
    pass


NEED_MORE_INPUT = NeedMoreInput()
END_OF_LOG = EndOfLog()


def messages_of(events) -> list[Message]:
    return [e.message for e in events if isinstance(e, MessageReady)]
