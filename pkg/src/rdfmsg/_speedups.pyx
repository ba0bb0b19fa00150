# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled string kernels. Semantics are defined by ``_purepy``; keep in sync."""

IRI = 0
BNODE = 1
LITERAL = 2


cdef inline int _hexval(Py_UCS4 c):
    cdef int v = <int>c
    if 48 <= v <= 57:
        return v - 48
    if 97 <= v <= 102:
        return v - 87
    if 65 <= v <= 70:
        return v - 55
    return -1


cdef inline bint _iri_forbidden(Py_UCS4 c):
    return (c <= 0x20 or c == u'<' or c == u'>' or c == u'"' or c == u'{' or c == u'}'
            or c == u'|' or c == u'^' or c == u'`' or c == u'\\')


cdef str _echar(Py_UCS4 c):
    if c == u't':
        return u'\t'
    if c == u'b':
        return u'\b'
    if c == u'n':
        return u'\n'
    if c == u'r':
        return u'\r'
    if c == u'f':
        return u'\f'
    if c == u'"':
        return u'"'
    if c == u"'":
        return u"'"
    if c == u'\\':
        return u'\\'
    return None


cdef str _unescape(str s, bint iri):
    cdef Py_ssize_t n = len(s)
    cdef Py_ssize_t i = 0, start = 0, width, k
    cdef Py_UCS4 c
    cdef long long cp
    cdef int h
    cdef str rep
    parts = []
    while i < n:
        c = s[i]
        if c != u'\\':
            i += 1
            continue
        if i > start:
            parts.append(s[start:i])
        if i + 1 >= n:
            raise ValueError(f"invalid escape sequence {s[i:i + 1]!r}" + (" in IRI" if iri else ""), i)
        c = s[i + 1]
        if c == u'u' or c == u'U':
            width = 4 if c == u'u' else 8
            cp = 0
            if i + 2 + width <= n:
                for k in range(i + 2, i + 2 + width):
                    h = _hexval(s[k])
                    if h < 0:
                        cp = -1
                        break
                    cp = cp * 16 + h
            else:
                cp = -1
            if cp >= 0:
                if cp > 0x10FFFF or (0xD800 <= cp <= 0xDFFF):
                    raise ValueError(f"escape encodes invalid code point U+{cp:X}", i)
                parts.append(chr(cp))
                i += 2 + width
                start = i
                continue
        rep = None if iri else _echar(c)
        if rep is None:
            raise ValueError(f"invalid escape sequence {s[i:i + 2]!r}" + (" in IRI" if iri else ""), i)
        parts.append(rep)
        i += 2
        start = i
    if start < n:
        parts.append(s[start:n])
    return u''.join(parts)


def escape_string(str s):
    cdef Py_ssize_t i, n = len(s), start = 0
    cdef Py_UCS4 c
    parts = None
    for i in range(n):
        c = s[i]
        if c >= 0x20 and c != u'"' and c != u'\\' and c != 0x7F:
            continue
        if parts is None:
            parts = []
        if i > start:
            parts.append(s[start:i])
        start = i + 1
        if c == u'"':
            parts.append(u'\\"')
        elif c == u'\\':
            parts.append(u'\\\\')
        elif c == 0x08:
            parts.append(u'\\b')
        elif c == 0x09:
            parts.append(u'\\t')
        elif c == 0x0A:
            parts.append(u'\\n')
        elif c == 0x0C:
            parts.append(u'\\f')
        elif c == 0x0D:
            parts.append(u'\\r')
        else:
            parts.append(u'\\u%04X' % <long>c)
    if parts is None:
        return s
    if start < n:
        parts.append(s[start:n])
    return u''.join(parts)


def unescape_string(str s):
    if u'\\' not in s:
        return s
    return _unescape(s, False)


def unescape_iri(str s):
    cdef Py_ssize_t i
    if u'\\' in s:
        s = _unescape(s, True)
    for i in range(len(s)):
        if _iri_forbidden(s[i]):
            raise ValueError(f"illegal character {s[i]!r} in IRI", i)
    return s


cdef inline Py_ssize_t _skip_ws(str line, Py_ssize_t pos, Py_ssize_t n):
    while pos < n and (line[pos] == u' ' or line[pos] == u'\t'):
        pos += 1
    return pos


cdef tuple _iri(str line, Py_ssize_t pos, Py_ssize_t n):
    cdef Py_ssize_t close = line.find(u'>', pos + 1)
    if close < 0:
        raise ValueError("unterminated IRI", pos)
    try:
        value = unescape_iri(line[pos + 1:close])
    except ValueError as e:
        raise ValueError(e.args[0], pos) from None
    return (IRI, value), close + 1


cdef tuple _label(str line, Py_ssize_t pos, Py_ssize_t n):
    cdef Py_ssize_t end = pos + 2
    cdef Py_UCS4 c
    while end < n:
        c = line[end]
        if c == u' ' or c == u'\t' or c == u'<' or c == u'"':
            break
        end += 1
    while end > pos + 2 and line[end - 1] == u'.':
        end -= 1
    if end == pos + 2:
        raise ValueError("empty blank node label", pos)
    return (BNODE, line[pos + 2:end]), end


cdef tuple _literal(str line, Py_ssize_t pos, Py_ssize_t n):
    cdef Py_ssize_t i = pos + 1, end, k
    cdef Py_UCS4 c
    cdef bint closed = False
    while i < n:
        c = line[i]
        if c == u'\\':
            if i + 1 >= n:
                break
            i += 2
            continue
        if c == u'"':
            closed = True
            break
        i += 1
    if not closed:
        raise ValueError("unterminated string literal", pos)
    body = line[pos + 1:i]
    if u'\n' in body or u'\r' in body:
        raise ValueError("raw line break in string literal", pos)
    try:
        lexical = unescape_string(body)
    except ValueError as e:
        raise ValueError(e.args[0], pos) from None
    end = i + 1
    if end + 1 < n and line[end] == u'^' and line[end + 1] == u'^':
        if end + 2 >= n or line[end + 2] != u'<':
            raise ValueError("expected datatype IRI after '^^'", end + 2)
        dt_term, k = _iri(line, end + 2, n)
        return (LITERAL, lexical, dt_term[1], None), k
    if end < n and line[end] == u'@':
        k = end + 1
        while k < n and ((line[k] >= u'a' and line[k] <= u'z') or (line[k] >= u'A' and line[k] <= u'Z')):
            k += 1
        if k == end + 1:
            raise ValueError("malformed language tag", end)
        while k + 1 < n and line[k] == u'-' and _alnum(line[k + 1]):
            k += 2
            while k < n and _alnum(line[k]):
                k += 1
        return (LITERAL, lexical, None, line[end + 1:k]), k
    return (LITERAL, lexical, None, None), end


cdef inline bint _alnum(Py_UCS4 c):
    return (c >= u'a' and c <= u'z') or (c >= u'A' and c <= u'Z') or (c >= u'0' and c <= u'9')


cdef tuple _term(str line, Py_ssize_t pos, Py_ssize_t n, bint iri_ok, bint bnode_ok, bint lit_ok, str role):
    cdef Py_UCS4 c
    if pos < n:
        c = line[pos]
        if c == u'<' and iri_ok:
            return _iri(line, pos, n)
        if c == u'_' and bnode_ok and pos + 1 < n and line[pos + 1] == u':':
            return _label(line, pos, n)
        if c == u'"' and lit_ok:
            return _literal(line, pos, n)
    raise ValueError(f"expected {role}", pos)


def parse_nquad_line(str line):
    cdef Py_ssize_t n = len(line)
    cdef Py_ssize_t pos = _skip_ws(line, 0, n)
    s, pos = _term(line, pos, n, True, True, False, "subject")
    pos = _skip_ws(line, pos, n)
    p, pos = _term(line, pos, n, True, False, False, "predicate IRI")
    pos = _skip_ws(line, pos, n)
    o, pos = _term(line, pos, n, True, True, True, "object")
    pos = _skip_ws(line, pos, n)
    g = None
    if pos < n and (line[pos] == u'<' or line[pos] == u'_'):
        g, pos = _term(line, pos, n, True, True, False, "graph label")
        pos = _skip_ws(line, pos, n)
    if pos >= n or line[pos] != u'.':
        raise ValueError("expected '.' at end of statement", pos)
    pos = _skip_ws(line, pos + 1, n)
    if pos != n:
        raise ValueError("unexpected content after '.'", pos)
    return s, p, o, g
