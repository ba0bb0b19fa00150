"""Incremental parser and canonical writer for message-aware TriG.

::

    VERSION "1.2-messages"
    PREFIX sosa: <http://www.w3.org/ns/sosa/>
    _:b0 sosa:hasSimpleResult 22 .
    MESSAGE # heartbeat follows
    MESSAGE

The lexer runs over raw bytes so that byte offsets are exact and chunk
boundaries may fall anywhere, including inside a UTF-8 sequence. A token is
only accepted once the bytes after it prove it cannot grow; until then the
parser reports :data:`~rdfmsg.events.NEED_MORE_INPUT`.
"""

from __future__ import annotations

import io
import re
from typing import BinaryIO, Iterable, Iterator, Mapping

from . import kernels
from .errors import ErrorKind, MessageSyntaxError
from .events import END_OF_LOG, NEED_MORE_INPUT, VERSION, MessageReady
from .message import Message
from .nqm import _chunks
from .terms import (
    _PN_CHARS,
    _PN_CHARS_U,
    BLANK_LABEL_RE,
    DEFAULT_GRAPH,
    PN_PREFIX_RE,
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    SIMPLE_LOCAL_RE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    DefaultGraph,
    Iri,
    Literal,
    Quad,
    iri_problem,
    resolve_iri,
)

# -- byte-level lexical patterns ---------------------------------------------------

_B_BASE = rb"A-Za-z\x80-\xff"
_B_U = _B_BASE + rb"_"
_B_CHARS = _B_U + rb"\-0-9"
_B_PLX = rb"%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%]"
_B_PREFIX = rb"[" + _B_BASE + rb"](?:[" + _B_CHARS + rb".]*[" + _B_CHARS + rb"])?"
_B_LOCAL = (
    rb"(?:[" + _B_U + rb":0-9]|" + _B_PLX + rb")"
    rb"(?:(?:[" + _B_CHARS + rb".:]|" + _B_PLX + rb")*(?:[" + _B_CHARS + rb":]|" + _B_PLX + rb"))?"
)

_WS = re.compile(rb"[ \t\r\n]+")
_COMMENT = re.compile(rb"#[^\r\n]*")
_IRIREF = re.compile(rb'<([^<>"{}|^`\x00-\x20]*)>')
_IRI_PARTIAL = re.compile(rb'<[^<>"{}|^`\x00-\x20]*\Z')
_PNAME = re.compile(rb"(" + _B_PREFIX + rb")?:(" + _B_LOCAL + rb")?")
_WORD = re.compile(rb"[A-Za-z][A-Za-z0-9_\-]*")
_BNODE = re.compile(rb"_:([" + _B_U + rb"0-9](?:[" + _B_CHARS + rb".]*[" + _B_CHARS + rb"])?)")
_AT = re.compile(rb"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)")
_NUMBER = re.compile(
    rb"([+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+))"
    rb"|([+-]?[0-9]*\.[0-9]+)"
    rb"|([+-]?[0-9]+)"
)
_LONG_STRING = {
    0x22: re.compile(rb'"""((?:(?:"|"")?(?:[^"\\]|\\[\s\S]))*)"""'),
    0x27: re.compile(rb"'''((?:(?:'|'')?(?:[^'\\]|\\[\s\S]))*)'''"),
}
_SHORT_STRING = {
    0x22: re.compile(rb'"((?:[^"\\\n\r]|\\[^\n\r])*)"'),
    0x27: re.compile(rb"'((?:[^'\\\n\r]|\\[^\n\r])*)'"),
}
_SHORT_PARTIAL = {
    0x22: re.compile(rb'"(?:[^"\\\n\r]|\\[^\n\r])*\\?\Z'),
    0x27: re.compile(rb"'(?:[^'\\\n\r]|\\[^\n\r])*\\?\Z"),
}
# bytes that could extend a name-like token if more input arrived
_NAME_TAIL = re.compile(rb"[A-Za-z0-9_\-+.:%\\\x80-\xff]*")
_CONTINUATION = bytes(range(0x80, 0xC0))

_PUNCT = frozenset(b"[](){},;")
_WS_BYTES = frozenset(b" \t\r\n")
_NUMBER_START = frozenset(b"0123456789+-")

# exact (str) checks applied after decoding name tokens
_PREFIX_OK = PN_PREFIX_RE
_LOCAL_OK = re.compile(
    f"(?:[{_PN_CHARS_U}:0-9]|%[0-9A-Fa-f]{{2}}|\\\\.)"
    f"(?:(?:[{_PN_CHARS}.:]|%[0-9A-Fa-f]{{2}}|\\\\.)*(?:[{_PN_CHARS}:]|%[0-9A-Fa-f]{{2}}|\\\\.))?",
    re.S,
)
_LOCAL_ESCAPE = re.compile(r"\\(.)", re.S)

IRI, PNAME, BNODE, STRING, LANG, NUMBER, WORD, PUNCT = range(8)
_NAME_LIKE = frozenset((PNAME, BNODE, LANG, NUMBER, WORD))
_NUMBER_TYPES = (XSD_DOUBLE, XSD_DECIMAL, XSD_INTEGER)
_FILE_KEYWORDS = {"PREFIX": 3, "BASE": 2, "VERSION": 2}


class _Token:
    __slots__ = ("kind", "value", "start", "end", "line", "col")

    def __init__(self, kind, value, start, end, line, col):
        self.kind = kind
        self.value = value
        self.start = start
        self.end = end
        self.line = line
        self.col = col

    def is_punct(self, ch):
        return self.kind == PUNCT and self.value == ch

    def is_word(self, word, fold=False):
        if self.kind != WORD:
            return False
        return (self.value.upper() == word) if fold else self.value == word

    def __repr__(self):
        return f"_Token({self.kind}, {self.value!r}, @{self.start})"


class _Fresh:
    """Anonymous blank node (``[]`` or collection cell); labelled at message close."""

    __slots__ = ()


class TrigMessageParser:
    """Push parser for message-aware TriG.

    ``feed(chunk)`` returns the :class:`MessageReady` events completed by the
    chunk followed by ``NEED_MORE_INPUT``; ``finish()`` flushes the trailing
    message and appends ``END_OF_LOG``. After a syntax error the parser is
    poisoned and re-raises that error on every call.

    ``prefixes`` and ``base`` seed the document state, which is how a byte
    span cut out of a larger document is re-parsed on its own.
    """

    def __init__(
        self,
        require_version: bool = True,
        prefixes: Mapping[str, str] | None = None,
        base: str | None = None,
    ):
        self.require_version = require_version
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self.base = base
        self.version: str | None = None
        self._buf = bytearray()
        self._pos = 0
        self._buf_offset = 0
        self._line = 1
        self._col = 1
        self._stmt: list[_Token] = []
        self._depth = 0
        self._pending: list[tuple] = []
        self._dirty = False
        self._seen_statement = False
        self._msg_start = 0
        self._after_message: _Token | None = None
        self._bom_checked = False
        self._error: MessageSyntaxError | None = None
        self._done = False
        # statement parser cursor
        self._toks: list[_Token] = []
        self._i = 0

    @property
    def pending_quad_count(self) -> int:
        """Quads parsed for the message currently being read."""
        return len(self._pending)

    @property
    def offset(self) -> int:
        return self._buf_offset + self._pos

    # -- driving ---------------------------------------------------------------

    def feed(self, data: bytes) -> list:
        self._check_usable()
        self._buf += data
        events: list = []
        self._run(False, events)
        events.append(NEED_MORE_INPUT)
        return events

    def finish(self) -> list:
        self._check_usable()
        events: list = []
        self._run(True, events)
        try:
            if self._stmt:
                self._err(ErrorKind.UNEXPECTED_TOKEN, "unexpected end of input inside a statement", self._stmt[-1])
            if self.require_version and self.version is None:
                raise MessageSyntaxError(ErrorKind.VERSION_MISSING, "document has no VERSION directive", 1, 1, 0)
            if self._dirty:
                self._emit(self.offset, events)
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

    def _run(self, final: bool, events: list):
        try:
            self._drain(final, events)
        except MessageSyntaxError as e:
            self._error = e
            raise
        if self._pos:
            del self._buf[: self._pos]
            self._buf_offset += self._pos
            self._pos = 0

    def _advance(self, to: int):
        seg = bytes(self._buf[self._pos : to])
        nl = seg.count(b"\n")
        if nl:
            self._line += nl
            tail = seg[seg.rfind(b"\n") + 1 :]
            self._col = 1 + len(tail.translate(None, _CONTINUATION))
        else:
            self._col += len(seg.translate(None, _CONTINUATION))
        self._pos = to

    def _drain(self, final: bool, events: list):
        buf = self._buf
        if not self._bom_checked:
            if len(buf) < 3 and not final and b"\xef\xbb\xbf".startswith(bytes(buf)):
                return
            self._bom_checked = True
            if buf.startswith(b"\xef\xbb\xbf") and self._buf_offset == 0:
                self._pos = 3
                self._msg_start = 3
        while True:
            if self._after_message is not None:
                if not self._message_line_end(final, events):
                    return
                continue
            pos = self._pos
            if pos >= len(buf):
                return
            c = buf[pos]
            if c in _WS_BYTES:
                self._advance(_WS.match(buf, pos).end())
                continue
            if c == 0x23:  # '#'
                end = _COMMENT.match(buf, pos).end()
                if end == len(buf) and not final:
                    return
                self._advance(end)
                continue
            tok = self._lex(final)
            if tok is None:
                return
            self._on_token(tok, events)

    def _message_line_end(self, final: bool, events: list) -> bool:
        """Consume the rest of a ``MESSAGE`` line; emit once its newline is read."""
        buf = self._buf
        while self._pos < len(buf):
            c = buf[self._pos]
            if c in (0x20, 0x09):
                self._advance(self._pos + 1)
            elif c == 0x23:
                end = _COMMENT.match(buf, self._pos).end()
                if end == len(buf) and not final:
                    return False
                self._advance(end)
            elif c == 0x0A:
                self._advance(self._pos + 1)
                self._close_message(events)
                return True
            elif c == 0x0D:
                if self._pos + 1 < len(buf):
                    self._advance(self._pos + (2 if buf[self._pos + 1] == 0x0A else 1))
                elif final:
                    self._advance(self._pos + 1)
                else:
                    return False
                self._close_message(events)
                return True
            else:
                self._err(ErrorKind.UNEXPECTED_TOKEN, "MESSAGE must end its line", self._here())
        if final:
            self._close_message(events)
            return True
        return False

    def _close_message(self, events):
        self._after_message = None
        self._emit(self.offset, events)

    def _emit(self, end: int, events: list):
        events.append(MessageReady(self._build_message(), self._msg_start, end))
        self._pending = []
        self._dirty = False
        self._msg_start = end

    def _build_message(self) -> Message:
        pending = self._pending
        if any(isinstance(t, _Fresh) for raw in pending for t in raw):
            used = {t.label for raw in pending for t in raw if isinstance(t, BlankNode)}
            names: dict[_Fresh, BlankNode] = {}
            counter = 0
            for raw in pending:
                for t in raw:
                    if isinstance(t, _Fresh) and t not in names:
                        while f"b{counter}" in used:
                            counter += 1
                        names[t] = BlankNode(f"b{counter}")
                        counter += 1
            pending = [tuple(names.get(t, t) if isinstance(t, _Fresh) else t for t in raw) for raw in pending]
        return Message(Quad(*raw) for raw in pending)

    def _here(self) -> _Token:
        return _Token(PUNCT, "", self.offset, self.offset, self._line, self._col)

    def _err(self, kind: ErrorKind, text: str, tok: _Token):
        raise MessageSyntaxError(kind, text, tok.line, tok.col, tok.start)

    # -- lexing ------------------------------------------------------------------

    def _lex(self, final: bool) -> _Token | None:
        buf = self._buf
        pos = self._pos
        n = len(buf)
        c = buf[pos]
        start = self._buf_offset + pos
        line, col = self._line, self._col

        def make(kind, value, end):
            tok = _Token(kind, value, start, self._buf_offset + end, line, col)
            self._advance(end)
            return tok

        def fail(kind, text):
            raise MessageSyntaxError(kind, text, line, col, start)

        if c == 0x3C:  # '<'
            m = _IRIREF.match(buf, pos)
            if m is None:
                if _IRI_PARTIAL.match(buf, pos) and not final:
                    return None
                fail(ErrorKind.BAD_IRI, "malformed IRI reference")
            if m.end() == n and not final:
                return None
            try:
                value = kernels.unescape_iri(m.group(1).decode("utf-8"))
            except (UnicodeDecodeError, ValueError) as e:
                fail(ErrorKind.BAD_IRI, _reason(e))
            return make(IRI, value, m.end())

        if c in (0x22, 0x27):  # '"' or "'"
            quote = bytes((c,))
            head = bytes(buf[pos : pos + 3])
            if len(head) < 3 and head == quote * len(head) and not final:
                return None
            if head == quote * 3:
                m = _LONG_STRING[c].match(buf, pos)
                if m is None:
                    if not final:
                        return None
                    fail(ErrorKind.BAD_LITERAL, "unterminated long string")
            else:
                m = _SHORT_STRING[c].match(buf, pos)
                if m is None:
                    if _SHORT_PARTIAL[c].match(buf, pos) and not final:
                        return None
                    fail(ErrorKind.BAD_LITERAL, "unterminated string")
            if m.end() == n and not final:
                return None
            try:
                value = kernels.unescape_string(m.group(1).decode("utf-8"))
            except (UnicodeDecodeError, ValueError) as e:
                fail(ErrorKind.BAD_LITERAL, _reason(e))
            return make(STRING, value, m.end())

        if c in _PUNCT:
            if pos + 1 == n and not final:
                return None
            return make(PUNCT, chr(c), pos + 1)

        if c == 0x5E:  # '^'
            if pos + 1 == n:
                if not final:
                    return None
                fail(ErrorKind.UNEXPECTED_TOKEN, "stray '^'")
            if buf[pos + 1] != 0x5E:
                fail(ErrorKind.UNEXPECTED_TOKEN, "expected '^^'")
            return make(PUNCT, "^^", pos + 2)

        if c == 0x2E:  # '.'
            if pos + 1 == n and not final:
                return None
            if pos + 1 < n and 0x30 <= buf[pos + 1] <= 0x39:
                return self._lex_name(NUMBER, _NUMBER, final, make, fail)
            return make(PUNCT, ".", pos + 1)

        if c == 0x5F:  # '_'
            if pos + 1 == n and not final:
                return None
            return self._lex_name(BNODE, _BNODE, final, make, fail)
        if c == 0x40:  # '@'
            return self._lex_name(LANG, _AT, final, make, fail)
        if c in _NUMBER_START:
            return self._lex_name(NUMBER, _NUMBER, final, make, fail)
        if c == 0x3A or c >= 0x80 or 0x41 <= c <= 0x5A or 0x61 <= c <= 0x7A:
            m = _PNAME.match(buf, pos)
            if m is not None:
                return self._lex_name(PNAME, _PNAME, final, make, fail)
            return self._lex_name(WORD, _WORD, final, make, fail)
        fail(ErrorKind.UNEXPECTED_TOKEN, f"unexpected character {chr(c)!r}")

    def _lex_name(self, kind, pattern, final, make, fail):
        buf = self._buf
        pos = self._pos
        m = pattern.match(buf, pos)
        if not final and _NAME_TAIL.match(buf, m.end() if m else pos + 1).end() == len(buf):
            return None
        if m is None:
            if kind == LANG:
                fail(ErrorKind.BAD_LITERAL, "malformed language tag")
            fail(ErrorKind.UNEXPECTED_TOKEN, "malformed token")
        try:
            if kind == NUMBER:
                value = (_NUMBER_TYPES[m.lastindex - 1], m.group(m.lastindex).decode("ascii"))
            elif kind == PNAME:
                prefix = (m.group(1) or b"").decode("utf-8")
                local = (m.group(2) or b"").decode("utf-8")
                if not _PREFIX_OK.fullmatch(prefix) or (local and not _LOCAL_OK.fullmatch(local)):
                    fail(ErrorKind.UNEXPECTED_TOKEN, "invalid prefixed name")
                value = (prefix, _LOCAL_ESCAPE.sub(r"\1", local))
            elif kind == BNODE:
                value = m.group(1).decode("utf-8")
                if not BLANK_LABEL_RE.fullmatch(value):
                    fail(ErrorKind.UNEXPECTED_TOKEN, f"invalid blank node label {value!r}")
            elif kind == LANG:
                value = m.group(1).decode("ascii")
            else:
                value = m.group().decode("ascii")
        except UnicodeDecodeError:
            fail(ErrorKind.UNEXPECTED_TOKEN, "invalid UTF-8")
        return make(kind, value, m.end())

    # -- statement assembly ---------------------------------------------------------

    def _on_token(self, tok: _Token, events: list):
        stmt = self._stmt
        if self.require_version and self.version is None:
            leading = stmt[0] if stmt else tok
            if not leading.is_word("VERSION", fold=True):
                self._err(ErrorKind.VERSION_MISSING, "expected VERSION directive first", tok)
        if tok.kind == WORD and tok.value == "MESSAGE":
            if stmt:
                self._err(ErrorKind.UNEXPECTED_TOKEN, "MESSAGE inside a statement", tok)
            self._after_message = tok
            return
        stmt.append(tok)
        if tok.kind == PUNCT:
            if tok.value in "[({":
                self._depth += 1
            elif tok.value in "])}":
                self._depth -= 1
                if self._depth < 0:
                    self._err(ErrorKind.UNEXPECTED_TOKEN, f"unbalanced {tok.value!r}", tok)
        first = stmt[0]
        size = _FILE_KEYWORDS.get(first.value.upper()) if first.kind == WORD else None
        if size is not None:
            done = len(stmt) == size
        else:
            done = self._depth == 0 and tok.kind == PUNCT and tok.value in ".}"
        if done:
            self._stmt = []
            self._statement(stmt)

    # -- statement parsing -------------------------------------------------------------

    def _peek(self) -> _Token | None:
        return self._toks[self._i] if self._i < len(self._toks) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "unexpected end of statement", self._toks[-1])
        self._i += 1
        return tok

    def _expect(self, ch: str) -> _Token:
        tok = self._next()
        if not tok.is_punct(ch):
            self._err(ErrorKind.UNEXPECTED_TOKEN, f"expected {ch!r}", tok)
        return tok

    def _statement(self, toks: list[_Token]):
        self._toks, self._i = toks, 0
        first = toks[0]
        if first.kind == WORD and first.value.upper() in _FILE_KEYWORDS:
            kw = first.value.upper()
            self._i = 1
            if kw == "VERSION":
                self._version(first)
            elif kw == "PREFIX":
                self._prefix()
            else:
                self._set_base(self._next())
        elif first.kind == LANG and first.value in ("prefix", "base"):
            self._i = 1
            if first.value == "prefix":
                self._prefix()
            else:
                self._set_base(self._next())
            self._expect(".")
        else:
            self._block()
            self._dirty = True
        self._seen_statement = True
        if self._i != len(toks):
            self._err(ErrorKind.UNEXPECTED_TOKEN, "unexpected token", toks[self._i])

    def _version(self, first: _Token):
        tok = self._next()
        if tok.kind != STRING:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "VERSION needs a string", tok)
        if self.version is not None or self._seen_statement:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "VERSION must precede every statement", first)
        if self.require_version and tok.value != VERSION:
            self._err(ErrorKind.VERSION_UNSUPPORTED, f"unsupported version {tok.value!r}", tok)
        self.version = tok.value
        self._msg_start = tok.end

    def _prefix(self):
        name = self._next()
        if name.kind != PNAME or name.value[1]:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "expected a prefix name like 'ex:'", name)
        iri = self._next()
        if iri.kind != IRI:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "expected an IRI", iri)
        self.prefixes[name.value[0]] = self._resolve(iri).value

    def _set_base(self, tok: _Token):
        if tok.kind != IRI:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "expected an IRI", tok)
        self.base = self._resolve(tok).value

    def _resolve(self, tok: _Token) -> Iri:
        value = resolve_iri(tok.value, self.base)
        problem = iri_problem(value)
        if problem:
            self._err(ErrorKind.BAD_IRI, problem, tok)
        return Iri(value)

    def _iri(self, tok: _Token) -> Iri:
        if tok.kind == IRI:
            return self._resolve(tok)
        prefix, local = tok.value
        ns = self.prefixes.get(prefix)
        if ns is None:
            self._err(ErrorKind.BAD_IRI, f"undefined prefix {prefix + ':'!r}", tok)
        problem = iri_problem(ns + local)
        if problem:
            self._err(ErrorKind.BAD_IRI, problem, tok)
        return Iri(ns + local)

    def _block(self):
        tok = self._peek()
        if tok.is_word("GRAPH", fold=True):
            self._i += 1
            label = self._graph_label()
            self._wrapped_graph(label)
        elif tok.is_punct("{"):
            self._wrapped_graph(DEFAULT_GRAPH)
        elif tok.is_punct("[") and self._is_anon():
            node = _Fresh()
            self._i += 2
            if self._peek() is not None and self._peek().is_punct("{"):
                self._wrapped_graph(node)
            else:
                self._predicate_object_list(node, DEFAULT_GRAPH)
                self._expect(".")
        elif tok.kind in (IRI, PNAME, BNODE):
            subject = self._subject_term(self._next())
            nxt = self._peek()
            if nxt is not None and nxt.is_punct("{"):
                self._wrapped_graph(subject)
            else:
                self._predicate_object_list(subject, DEFAULT_GRAPH)
                self._expect(".")
        else:
            self._triples(DEFAULT_GRAPH)
            self._expect(".")

    def _is_anon(self) -> bool:
        nxt = self._toks[self._i + 1] if self._i + 1 < len(self._toks) else None
        return nxt is not None and nxt.is_punct("]")

    def _graph_label(self):
        tok = self._peek()
        if tok is not None and tok.is_punct("[") and self._is_anon():
            self._i += 2
            return _Fresh()
        tok = self._next()
        if tok.kind in (IRI, PNAME, BNODE):
            return self._subject_term(tok)
        self._err(ErrorKind.UNEXPECTED_TOKEN, "expected a graph name", tok)

    def _wrapped_graph(self, graph):
        self._expect("{")
        while True:
            tok = self._peek()
            if tok is None or tok.is_punct("}"):
                break
            self._triples(graph)
            tok = self._peek()
            if tok is not None and tok.is_punct("."):
                self._i += 1
                continue
            break
        self._expect("}")

    def _triples(self, graph):
        tok = self._next()
        if tok.is_punct("["):
            if self._peek() is not None and self._peek().is_punct("]"):
                self._i += 1
                self._predicate_object_list(_Fresh(), graph)
                return
            node = self._property_list(graph)
            nxt = self._peek()
            if nxt is not None and not nxt.is_punct(".") and not nxt.is_punct("}"):
                self._predicate_object_list(node, graph)
        elif tok.is_punct("("):
            node = self._collection(graph)
            self._predicate_object_list(node, graph)
        elif tok.kind in (IRI, PNAME, BNODE):
            self._predicate_object_list(self._subject_term(tok), graph)
        else:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "expected a subject", tok)

    def _subject_term(self, tok: _Token):
        if tok.kind == BNODE:
            return BlankNode(tok.value)
        return self._iri(tok)

    def _predicate_object_list(self, subject, graph):
        self._verb_objects(subject, graph)
        while True:
            tok = self._peek()
            if tok is None or not tok.is_punct(";"):
                return
            while tok is not None and tok.is_punct(";"):
                self._i += 1
                tok = self._peek()
            if tok is None or tok.kind not in (IRI, PNAME, BNODE) and not tok.is_word("a"):
                return
            self._verb_objects(subject, graph)

    def _verb_objects(self, subject, graph):
        tok = self._next()
        if tok.is_word("a"):
            predicate = RDF_TYPE
        elif tok.kind in (IRI, PNAME):
            predicate = self._iri(tok)
        elif tok.kind == BNODE or tok.is_punct("["):
            self._err(ErrorKind.PREDICATE_BLANK_NODE, "a blank node cannot be a predicate", tok)
        else:
            self._err(ErrorKind.UNEXPECTED_TOKEN, "expected a predicate", tok)
        while True:
            obj = self._object(graph)
            self._pending.append((subject, predicate, obj, graph))
            tok = self._peek()
            if tok is None or not tok.is_punct(","):
                return
            self._i += 1

    def _object(self, graph):
        tok = self._next()
        kind = tok.kind
        if kind in (IRI, PNAME):
            return self._iri(tok)
        if kind == BNODE:
            return BlankNode(tok.value)
        if kind == STRING:
            nxt = self._peek()
            if nxt is not None and nxt.kind == LANG:
                self._i += 1
                return Literal(tok.value, XSD_STRING, nxt.value)
            if nxt is not None and nxt.is_punct("^^"):
                self._i += 1
                dt = self._next()
                if dt.kind not in (IRI, PNAME):
                    self._err(ErrorKind.BAD_LITERAL, "expected a datatype IRI", dt)
                datatype = self._iri(dt)
                try:
                    return Literal(tok.value, datatype)
                except ValueError as e:
                    self._err(ErrorKind.BAD_LITERAL, str(e), tok)
            return Literal(tok.value)
        if kind == NUMBER:
            return Literal(tok.value[1], tok.value[0])
        if tok.is_word("true") or tok.is_word("false"):
            return Literal(tok.value, XSD_BOOLEAN)
        if tok.is_punct("["):
            if self._peek() is not None and self._peek().is_punct("]"):
                self._i += 1
                return _Fresh()
            return self._property_list(graph)
        if tok.is_punct("("):
            return self._collection(graph)
        self._err(ErrorKind.UNEXPECTED_TOKEN, "expected an object", tok)

    def _property_list(self, graph):
        """``[ p o ; ... ]`` after its opening bracket; returns the node."""
        node = _Fresh()
        self._predicate_object_list(node, graph)
        self._expect("]")
        return node

    def _collection(self, graph):
        """``( o1 o2 ... )`` after its opening paren; returns the head node."""
        cells = []
        while True:
            tok = self._peek()
            if tok is None:
                self._next()
            if tok.is_punct(")"):
                self._i += 1
                break
            cells.append(self._object(graph))
        if not cells:
            return RDF_NIL
        nodes = [_Fresh() for _ in cells]
        for k, (node, item) in enumerate(zip(nodes, cells)):
            self._pending.append((node, RDF_FIRST, item, graph))
            self._pending.append((node, RDF_REST, nodes[k + 1] if k + 1 < len(nodes) else RDF_NIL, graph))
        return nodes[0]


def _reason(e: Exception) -> str:
    if isinstance(e, UnicodeDecodeError):
        return "invalid UTF-8"
    return e.args[0] if e.args else str(e)


# -- convenience entry points -------------------------------------------------------


def parser_new(require_version: bool = True) -> TrigMessageParser:
    return TrigMessageParser(require_version)


def iter_events(source, require_version: bool = True, prefixes=None, base=None) -> Iterator[MessageReady]:
    parser = TrigMessageParser(require_version, prefixes, base)
    for chunk in _chunks(source):
        for ev in parser.feed(chunk):
            if isinstance(ev, MessageReady):
                yield ev
    for ev in parser.finish():
        if isinstance(ev, MessageReady):
            yield ev


def trigm_parse(source, require_version: bool = True, prefixes=None, base=None) -> Iterator[Message]:
    for ev in iter_events(source, require_version, prefixes, base):
        yield ev.message


def parse_trigm(data: bytes | str, require_version: bool = True, prefixes=None, base=None) -> list[Message]:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return list(trigm_parse(data, require_version, prefixes, base))


# -- writing ---------------------------------------------------------------------------

_INTEGER_LEX = re.compile(r"[+-]?[0-9]+")
_DECIMAL_LEX = re.compile(r"[+-]?[0-9]*\.[0-9]+")
_DOUBLE_LEX = re.compile(r"[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+")
_SHORTHAND = {XSD_INTEGER: _INTEGER_LEX, XSD_DECIMAL: _DECIMAL_LEX, XSD_DOUBLE: _DOUBLE_LEX}


class _TermWriter:
    def __init__(self, prefixes: Mapping[str, str] | None):
        prefixes = dict(prefixes or {})
        for name, ns in prefixes.items():
            if not PN_PREFIX_RE.fullmatch(name):
                raise ValueError(f"invalid prefix name {name!r}")
            problem = iri_problem(ns)
            if problem:
                raise ValueError(f"prefix {name!r}: {problem}")
        self.prefixes = prefixes
        self._by_length = sorted(prefixes.items(), key=lambda kv: -len(kv[1]))

    def header(self) -> str:
        return "".join(f"PREFIX {name}: <{ns}>\n" for name, ns in self.prefixes.items())

    def iri(self, iri: Iri) -> str:
        value = iri.value
        for name, ns in self._by_length:
            if value.startswith(ns) and SIMPLE_LOCAL_RE.fullmatch(value, len(ns)):
                return f"{name}:{value[len(ns):]}"
        return f"<{value}>"

    def term(self, t) -> str:
        if isinstance(t, Iri):
            return self.iri(t)
        if isinstance(t, BlankNode):
            return f"_:{t.label}"
        if t.language is not None:
            return f'"{kernels.escape_string(t.lexical)}"@{t.language}'
        dt = t.datatype
        if dt == XSD_STRING:
            return f'"{kernels.escape_string(t.lexical)}"'
        shorthand = _SHORTHAND.get(dt)
        if shorthand is not None and shorthand.fullmatch(t.lexical):
            return t.lexical
        if dt == XSD_BOOLEAN and t.lexical in ("true", "false"):
            return t.lexical
        return f'"{kernels.escape_string(t.lexical)}"^^{self.iri(dt)}'

    def statements(self, m: Message) -> str:
        """The message's quads in stored order; consecutive named-graph quads share a block."""
        out = []
        current = None
        for q in m.quads:
            triple = f"{self.term(q.subject)} {'a' if q.predicate == RDF_TYPE else self.iri(q.predicate)} {self.term(q.object)} ."
            if q.graph != current:
                if current is not None and not isinstance(current, DefaultGraph):
                    out.append("}\n")
                current = q.graph
                if not isinstance(current, DefaultGraph):
                    out.append(f"{self.term(current)} {{\n")
            out.append(f"    {triple}\n" if not isinstance(current, DefaultGraph) else f"{triple}\n")
        if current is not None and not isinstance(current, DefaultGraph):
            out.append("}\n")
        return "".join(out)


def write_log(messages: Iterable[Message], sink: BinaryIO, prefixes: Mapping[str, str] | None = None) -> int:
    """Write the canonical TriG-Messages form; returns the byte count.

    Every message, including the last, is terminated by a ``MESSAGE`` line.
    """
    writer = _TermWriter(prefixes)
    head = f'VERSION "{VERSION}"\n{writer.header()}'.encode("utf-8")
    sink.write(head)
    total = len(head)
    for m in messages:
        chunk = (writer.statements(m) + "MESSAGE\n").encode("utf-8")
        sink.write(chunk)
        total += len(chunk)
    return total


def dumps_trigm(messages: Iterable[Message], prefixes: Mapping[str, str] | None = None) -> bytes:
    buf = io.BytesIO()
    write_log(messages, buf, prefixes)
    return buf.getvalue()


def dumps_trig(m: Message, prefixes: Mapping[str, str] | None = None) -> bytes:
    """Plain TriG for one message (no VERSION or MESSAGE); empty message gives b''."""
    if not len(m):
        return b""
    writer = _TermWriter(prefixes)
    return (writer.header() + writer.statements(m)).encode("utf-8")
