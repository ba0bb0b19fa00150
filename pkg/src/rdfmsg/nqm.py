"""N-Quads-Messages: line-oriented quads with explicit message boundaries.

A document looks like::

    VERSION "1.2-messages"
    <http://ex.org/s> <http://ex.org/p> "v" .
    MESSAGE
    MESSAGE

Every line is classifiable by its first token: ``VERSION``, ``MESSAGE``,
``#`` or a quad. ``MESSAGE`` terminates the current (possibly empty) message.
"""

from __future__ import annotations

import functools
import io
import re
from typing import BinaryIO, Iterable, Iterator, Union

from . import kernels
from .errors import ErrorKind, MessageSyntaxError
from .events import END_OF_LOG, NEED_MORE_INPUT, VERSION, MessageReady
from .message import Message
from .terms import XSD_STRING, BlankNode, DefaultGraph, Iri, Literal, Quad

VERSION_LINE = f'VERSION "{VERSION}"\n'.encode()
MESSAGE_LINE = b"MESSAGE\n"

_KEYWORD_LINE = re.compile(r'(VERSION|MESSAGE)\b(?:[ \t]+"([^"\\]*)")?[ \t]*(#.*)?$')

Source = Union[bytes, bytearray, memoryview, BinaryIO, Iterable[bytes]]

_READ_SIZE = 1 << 16


@functools.lru_cache(maxsize=8192)
def _iri(value: str) -> Iri:
    return Iri(value)


def _term(t):
    kind = t[0]
    if kind == kernels.IRI:
        return _iri(t[1])
    if kind == kernels.BNODE:
        return BlankNode(t[1])
    return Literal(t[1], _iri(t[2]) if t[2] is not None else XSD_STRING, t[3])


def _error_kind(text: str, line: str, col: int) -> ErrorKind:
    ch = line[col : col + 1]
    if text == "expected predicate IRI" and line.startswith("_:", col):
        return ErrorKind.PREDICATE_BLANK_NODE
    if text.startswith("expected") or text.startswith("unexpected"):
        return ErrorKind.UNEXPECTED_TOKEN
    if ch == "<":
        return ErrorKind.BAD_IRI
    if ch in ('"', "@"):
        return ErrorKind.BAD_LITERAL
    return ErrorKind.UNEXPECTED_TOKEN


def parse_quad_line(line: str) -> Quad:
    """Parse one N-Quads statement; raises ``ValueError(text, column)``."""
    s, p, o, g = kernels.parse_nquad_line(line)
    try:
        return Quad(_term(s), _term(p), _term(o), DefaultGraph() if g is None else _term(g))
    except ValueError as e:
        raise ValueError(str(e), len(line) - len(line.lstrip(" \t"))) from None


class NQuadsMessageParser:
    """Incremental N-Quads-Messages parser.

    ``feed`` accepts arbitrary byte chunks and returns the messages completed
    by the lines they finish; ``finish`` flushes a trailing unterminated
    message. With ``require_version=False`` the VERSION line is optional,
    which is how single log records are parsed.
    """

    def __init__(self, require_version: bool = True, start_offset: int = 0):
        self.require_version = require_version
        self.version: str | None = None
        self._buf = bytearray()
        self._offset = start_offset  # absolute offset of _buf[0]
        self._line_no = 1
        self._pending: list[Quad] = []
        self._dirty = False
        self._seen_content = False
        self._msg_start = start_offset
        self._error: MessageSyntaxError | None = None
        self._done = False

    @property
    def pending_quad_count(self) -> int:
        return len(self._pending)

    def feed(self, data: bytes) -> list:
        self._check_usable()
        self._buf += data
        events = []
        try:
            consumed = 0
            while True:
                nl = self._buf.find(b"\n", consumed)
                if nl < 0:
                    break
                self._line(bytes(self._buf[consumed : nl + 1]), self._offset + consumed, events)
                consumed = nl + 1
            del self._buf[:consumed]
            self._offset += consumed
        except MessageSyntaxError as e:
            self._error = e
            raise
        events.append(NEED_MORE_INPUT)
        return events

    def finish(self) -> list:
        self._check_usable()
        events = []
        try:
            if self._buf:
                tail = bytes(self._buf)
                self._line(tail, self._offset, events)
                self._offset += len(tail)
                self._buf.clear()
            if self.require_version and self.version is None:
                raise MessageSyntaxError(ErrorKind.VERSION_MISSING, "document has no VERSION line", 1, 1, 0)
            if self._dirty:
                self._emit(self._offset, events)
        except MessageSyntaxError as e:
            self._error = e
            raise
        self._done = True
        events.append(END_OF_LOG)
        return events

    def _check_usable(self):
        if self._error is not None:
            raise self._error
        if self._done:
            raise RuntimeError("parser already finished")

    def _emit(self, end: int, events: list):
        events.append(MessageReady(Message(self._pending), self._msg_start, end))
        self._pending = []
        self._dirty = False
        self._msg_start = end

    def _fail(self, kind, text, offset, col=0, raw=b""):
        byte_col = len(raw.decode("utf-8", "replace")[:col].encode("utf-8"))
        raise MessageSyntaxError(kind, text, self._line_no, col + 1, offset + byte_col)

    def _line(self, raw: bytes, offset: int, events: list):
        if offset == 0 and raw.startswith(b"\xef\xbb\xbf"):
            raw, offset = raw[3:], 3
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            self._fail(ErrorKind.UNEXPECTED_TOKEN, "invalid UTF-8", offset + e.start)
        end = offset + len(raw)
        if text.endswith("\n"):
            text = text[:-1]
        if text.endswith("\r"):
            text = text[:-1]
        body = text.lstrip(" \t")
        first = body[:1]
        if first in ("<", "_"):
            if self.require_version and self.version is None:
                self._fail(ErrorKind.VERSION_MISSING, "quad before VERSION line", offset)
            try:
                quad = parse_quad_line(text)
            except ValueError as e:
                msg, col = e.args if len(e.args) == 2 else (str(e), 0)
                self._fail(_error_kind(msg, text, col), msg, offset, col, raw)
            self._pending.append(quad)
            self._dirty = self._seen_content = True
        elif first == "#" or not body:
            pass
        else:
            col = len(text) - len(body)
            m = _KEYWORD_LINE.match(body)
            if m is None:
                self._fail(ErrorKind.UNEXPECTED_TOKEN, f"unrecognized line {body[:20]!r}", offset, col, raw)
            keyword, value = m.group(1), m.group(2)
            if keyword == "VERSION":
                if value is None:
                    self._fail(ErrorKind.UNEXPECTED_TOKEN, "VERSION needs a quoted string", offset, col, raw)
                if self.version is not None or self._seen_content:
                    self._fail(ErrorKind.UNEXPECTED_TOKEN, "VERSION must precede all messages", offset, col, raw)
                if self.require_version and value != VERSION:
                    self._fail(ErrorKind.VERSION_UNSUPPORTED, f"unsupported version {value!r}", offset, col, raw)
                self.version = value
                self._msg_start = end
            else:
                if value is not None:
                    self._fail(ErrorKind.UNEXPECTED_TOKEN, "MESSAGE takes no argument", offset, col, raw)
                if self.require_version and self.version is None:
                    self._fail(ErrorKind.VERSION_MISSING, "MESSAGE before VERSION line", offset, col, raw)
                self._seen_content = True
                self._emit(end, events)
        self._line_no += 1


def _chunks(source: Source) -> Iterator[bytes]:
    if isinstance(source, (bytes, bytearray, memoryview)):
        yield bytes(source)
    elif hasattr(source, "read"):
        while True:
            chunk = source.read(_READ_SIZE)
            if not chunk:
                break
            yield chunk
    else:
        yield from source


def iter_events(source: Source, require_version: bool = True, start_offset: int = 0) -> Iterator:
    parser = NQuadsMessageParser(require_version, start_offset)
    for chunk in _chunks(source):
        for ev in parser.feed(chunk):
            if isinstance(ev, MessageReady):
                yield ev
    for ev in parser.finish():
        if isinstance(ev, MessageReady):
            yield ev


def nqm_parse(source: Source, require_version: bool = True) -> Iterator[Message]:
    """Stream the messages of an N-Quads-Messages document."""
    for ev in iter_events(source, require_version):
        yield ev.message


def parse_nqm(data: bytes | str, require_version: bool = True) -> list[Message]:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return list(nqm_parse(data, require_version))


# -- writing ----------------------------------------------------------------------


def format_term(t) -> str:
    if isinstance(t, Iri):
        return f"<{t.value}>"
    if isinstance(t, BlankNode):
        return f"_:{t.label}"
    lex = kernels.escape_string(t.lexical)
    if t.language is not None:
        return f'"{lex}"@{t.language}'
    if t.datatype == XSD_STRING:
        return f'"{lex}"'
    return f'"{lex}"^^<{t.datatype.value}>'


def format_quad(q: Quad) -> str:
    if isinstance(q.graph, DefaultGraph):
        return f"{format_term(q.subject)} {format_term(q.predicate)} {format_term(q.object)} ."
    return f"{format_term(q.subject)} {format_term(q.predicate)} {format_term(q.object)} {format_term(q.graph)} ."


def format_message(m: Message) -> bytes:
    """One log record: the message's quad lines followed by ``MESSAGE``."""
    if not len(m):
        return MESSAGE_LINE
    return ("\n".join(format_quad(q) for q in m.quads) + "\nMESSAGE\n").encode("utf-8")


def nqm_write(messages: Iterable[Message], sink: BinaryIO) -> int:
    """Write a complete document to ``sink``; returns the byte count."""
    sink.write(VERSION_LINE)
    total = len(VERSION_LINE)
    for m in messages:
        record = format_message(m)
        sink.write(record)
        total += len(record)
    return total


def nqm_dumps(messages: Iterable[Message]) -> bytes:
    buf = io.BytesIO()
    nqm_write(messages, buf)
    return buf.getvalue()
