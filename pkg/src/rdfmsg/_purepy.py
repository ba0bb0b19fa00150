"""Pure-Python string kernels (fallback for the compiled ``_speedups`` module).

Both implementations expose the same functions with identical results and
identical error positions; ``tests/test_kernels.py`` holds them to that.

Term tuples returned by :func:`parse_nquad_line`::

    (IRI, value)                      value with \\u escapes decoded
    (BNODE, label)                    label not yet validated
    (LITERAL, lexical, dt, lang)      dt is None for plain strings

Errors are ``ValueError(text, column)`` with a 0-based column.
"""

import re

IRI = 0
BNODE = 1
LITERAL = 2

_ECHARS = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

_ESCAPE_TABLE = {i: f"\\u{i:04X}" for i in range(0x20)}
_ESCAPE_TABLE.update({0x7F: "\\u007F", 0x08: "\\b", 0x09: "\\t", 0x0A: "\\n", 0x0C: "\\f", 0x0D: "\\r"})
_ESCAPE_TABLE.update({ord('"'): '\\"', ord("\\"): "\\\\"})

_ESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.)|$)", re.S)
_IRI_BAD = re.compile(r'[\x00-\x20<>"{}|^`\\]')

_WS = re.compile(r"[ \t]*")
_IRI_TOKEN = re.compile(r"<([^>]*)>")
_LABEL_TOKEN = re.compile(r"_:([^ \t<\"]*)")
_STRING_TOKEN = re.compile(r'"((?:[^"\\]|\\.)*)"', re.S)
_LANG_TOKEN = re.compile(r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)")


def _code_point(m):
    cp = int(m.group(1) or m.group(2), 16)
    if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        raise ValueError(f"escape encodes invalid code point U+{cp:X}", m.start())
    return chr(cp)


def escape_string(s):
    return s.translate(_ESCAPE_TABLE)


def unescape_string(s):
    if "\\" not in s:
        return s

    def sub(m):
        if m.group(3) is None and m.end() > m.start() + 1:
            return _code_point(m)
        ch = m.group(3)
        if ch is None or ch not in _ECHARS:
            raise ValueError(f"invalid escape sequence {m.group()!r}", m.start())
        return _ECHARS[ch]

    return _ESCAPE_RE.sub(sub, s)


def unescape_iri(s):
    """Decode \\u escapes in an IRI body and reject characters IRIs may not hold."""
    if "\\" in s:

        def sub(m):
            if m.group(3) is None and m.end() > m.start() + 1:
                return _code_point(m)
            raise ValueError(f"invalid escape sequence {m.group()!r} in IRI", m.start())

        s = _ESCAPE_RE.sub(sub, s)
    bad = _IRI_BAD.search(s)
    if bad:
        raise ValueError(f"illegal character {bad.group()!r} in IRI", bad.start())
    return s


def _iri(line, pos):
    m = _IRI_TOKEN.match(line, pos)
    if m is None:
        raise ValueError("unterminated IRI", pos)
    try:
        value = unescape_iri(m.group(1))
    except ValueError as e:
        raise ValueError(e.args[0], pos) from None
    return (IRI, value), m.end()


def _label(line, pos):
    m = _LABEL_TOKEN.match(line, pos)
    end = m.end()
    while end > pos + 2 and line[end - 1] == ".":
        end -= 1
    label = line[pos + 2 : end]
    if not label:
        raise ValueError("empty blank node label", pos)
    return (BNODE, label), end


def _literal(line, pos):
    m = _STRING_TOKEN.match(line, pos)
    if m is None:
        raise ValueError("unterminated string literal", pos)
    body = m.group(1)
    if "\n" in body or "\r" in body:
        raise ValueError("raw line break in string literal", pos)
    try:
        lexical = unescape_string(body)
    except ValueError as e:
        raise ValueError(e.args[0], pos) from None
    end = m.end()
    if line.startswith("^^", end):
        if not line.startswith("<", end + 2):
            raise ValueError("expected datatype IRI after '^^'", end + 2)
        (_, dt), end = _iri(line, end + 2)
        return (LITERAL, lexical, dt, None), end
    if line.startswith("@", end):
        lm = _LANG_TOKEN.match(line, end)
        if lm is None:
            raise ValueError("malformed language tag", end)
        return (LITERAL, lexical, None, lm.group(1)), lm.end()
    return (LITERAL, lexical, None, None), end


def _term(line, pos, allowed, role):
    ch = line[pos : pos + 1]
    if ch == "<" and IRI in allowed:
        return _iri(line, pos)
    if ch == "_" and BNODE in allowed and line.startswith("_:", pos):
        return _label(line, pos)
    if ch == '"' and LITERAL in allowed:
        return _literal(line, pos)
    raise ValueError(f"expected {role}", pos)


def parse_nquad_line(line):
    """Parse one N-Quads statement into ``(subject, predicate, object, graph)``.

    ``graph`` is None for the default graph. Trailing spaces after the final
    ``.`` are allowed; comments are not.
    """
    pos = _WS.match(line, 0).end()
    s, pos = _term(line, pos, (IRI, BNODE), "subject")
    pos = _WS.match(line, pos).end()
    p, pos = _term(line, pos, (IRI,), "predicate IRI")
    pos = _WS.match(line, pos).end()
    o, pos = _term(line, pos, (IRI, BNODE, LITERAL), "object")
    pos = _WS.match(line, pos).end()
    g = None
    if line[pos : pos + 1] in ("<", "_"):
        g, pos = _term(line, pos, (IRI, BNODE), "graph label")
        pos = _WS.match(line, pos).end()
    if line[pos : pos + 1] != ".":
        raise ValueError("expected '.' at end of statement", pos)
    pos = _WS.match(line, pos + 1).end()
    if pos != len(line):
        raise ValueError("unexpected content after '.'", pos)
    return s, p, o, g
