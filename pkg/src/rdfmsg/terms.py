"""RDF terms and quads.

Terms are immutable value objects. A :class:`BlankNode` is identified by its
label *and* the scope token of the message that owns it, so ``_:b0`` in two
messages denotes two different nodes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

_PN_CHARS_BASE = (
    "A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    "\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF"
    "\uFDF0-\uFFFD\U00010000-\U000EFFFF"
)
_PN_CHARS_U = _PN_CHARS_BASE + "_"
_PN_CHARS = _PN_CHARS_U + "\\-0-9\u00B7\u0300-\u036F\u203F-\u2040"

BLANK_LABEL_RE = re.compile(f"[{_PN_CHARS_U}0-9](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?")
PN_PREFIX_RE = re.compile(f"(?:[{_PN_CHARS_BASE}](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?)?")
# Local names the writer can emit without any escaping.
SIMPLE_LOCAL_RE = re.compile(f"(?:[{_PN_CHARS_U}0-9](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?)?")
PN_LOCAL_RE = re.compile(
    f"(?:[{_PN_CHARS_U}:0-9]|%[0-9A-Fa-f]{{2}})"
    f"(?:(?:[{_PN_CHARS}.:]|%[0-9A-Fa-f]{{2}})*(?:[{_PN_CHARS}:]|%[0-9A-Fa-f]{{2}}))?"
)
LANGTAG_RE = re.compile(r"[a-zA-Z]+(?:-[a-zA-Z0-9]+)*")

_SCHEME_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")
_FORBIDDEN_IRI_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\\x7f]')


def is_absolute_iri(value: str) -> bool:
    return _SCHEME_RE.match(value) is not None


def iri_problem(value: str) -> str | None:
    """Return why ``value`` is not a usable absolute IRI, or None."""
    if not value:
        return "empty IRI"
    bad = _FORBIDDEN_IRI_CHARS.search(value)
    if bad:
        return f"illegal character {bad.group()!r} in IRI"
    if not is_absolute_iri(value):
        return f"relative IRI {value!r} with no base"
    return None


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        problem = iri_problem(self.value)
        if problem:
            raise ValueError(problem)

    def __str__(self):
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str
    scope: Optional[int] = None

    def __post_init__(self):
        if not BLANK_LABEL_RE.fullmatch(self.label):
            raise ValueError(f"invalid blank node label {self.label!r}")

    def unscoped(self) -> "BlankNode":
        return self if self.scope is None else BlankNode(self.label)

    def __str__(self):
        return f"_:{self.label}"


XSD_STRING = Iri(XSD + "string")
XSD_INTEGER = Iri(XSD + "integer")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_DOUBLE = Iri(XSD + "double")
XSD_BOOLEAN = Iri(XSD + "boolean")
XSD_DATETIME = Iri(XSD + "dateTime")
RDF_LANGSTRING = Iri(RDF + "langString")
RDF_TYPE = Iri(RDF + "type")
RDF_FIRST = Iri(RDF + "first")
RDF_REST = Iri(RDF + "rest")
RDF_NIL = Iri(RDF + "nil")


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: Iri = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self):
        if self.language is not None:
            if not LANGTAG_RE.fullmatch(self.language):
                raise ValueError(f"invalid language tag {self.language!r}")
            if self.datatype != RDF_LANGSTRING:
                # a language tag implies rdf:langString
                if self.datatype != XSD_STRING:
                    raise ValueError("language-tagged literal must be rdf:langString")
                object.__setattr__(self, "datatype", RDF_LANGSTRING)
        elif self.datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal needs a language tag")

    def __str__(self):
        if self.language is not None:
            return f'"{self.lexical}"@{self.language}'
        return f'"{self.lexical}"^^{self.datatype}'


class DefaultGraph:
    """The default graph slot of a quad (singleton)."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DEFAULT_GRAPH"

    def __reduce__(self):
        return (DefaultGraph, ())


DEFAULT_GRAPH = DefaultGraph()

Subject = Union[Iri, BlankNode]
Term = Union[Iri, BlankNode, Literal]
GraphName = Union[DefaultGraph, Iri, BlankNode]


@dataclass(frozen=True, slots=True)
class Quad:
    subject: Subject
    predicate: Iri
    object: Term
    graph: GraphName = DEFAULT_GRAPH

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError(f"quad subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TypeError(f"quad predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise TypeError(f"quad object must be a term, got {self.object!r}")
        if not isinstance(self.graph, (DefaultGraph, Iri, BlankNode)):
            raise TypeError(f"quad graph must be a graph name, got {self.graph!r}")

    def terms(self):
        return (self.subject, self.predicate, self.object, self.graph)

    def map_terms(self, fn) -> "Quad":
        return Quad(fn(self.subject), self.predicate, fn(self.object), fn(self.graph))


# -- reference resolution (RFC 3986 section 5.2) ---------------------------------

_URI_RE = re.compile(r"^(?:([^:/?#]+):)?(?://([^/?#]*))?([^?#]*)(?:\?([^#]*))?(?:#(.*))?$", re.S)


def _remove_dot_segments(path: str) -> str:
    out: list[str] = []
    while path:
        if path.startswith("../"):
            path = path[3:]
        elif path.startswith("./"):
            path = path[2:]
        elif path.startswith("/./"):
            path = path[2:]
        elif path == "/.":
            path = "/"
        elif path.startswith("/../"):
            path = path[3:]
            if out:
                out.pop()
        elif path == "/..":
            path = "/"
            if out:
                out.pop()
        elif path in (".", ".."):
            path = ""
        else:
            start = 1 if path.startswith("/") else 0
            cut = path.find("/", start)
            if cut < 0:
                cut = len(path)
            out.append(path[:cut])
            path = path[cut:]
    return "".join(out)


def resolve_iri(reference: str, base: str | None) -> str:
    """Resolve ``reference`` against ``base``; absolute references pass through."""
    if base is None or is_absolute_iri(reference):
        return reference
    r_scheme, r_auth, r_path, r_query, r_frag = _URI_RE.match(reference).groups()
    b_scheme, b_auth, b_path, b_query, _ = _URI_RE.match(base).groups()
    if r_auth is not None:
        auth, path, query = r_auth, _remove_dot_segments(r_path), r_query
    else:
        auth = b_auth
        if r_path == "":
            path = b_path
            query = r_query if r_query is not None else b_query
        else:
            if r_path.startswith("/"):
                path = _remove_dot_segments(r_path)
            else:
                if b_auth is not None and b_path == "":
                    merged = "/" + r_path
                else:
                    merged = b_path[: b_path.rfind("/") + 1] + r_path
                path = _remove_dot_segments(merged)
            query = r_query
    return _recompose(b_scheme, auth, path, query, r_frag)


def _recompose(scheme, auth, path, query, frag) -> str:
    parts = []
    if scheme is not None:
        parts.append(scheme + ":")
    if auth is not None:
        parts.append("//" + auth)
    parts.append(path)
    if query is not None:
        parts.append("?" + query)
    if frag is not None:
        parts.append("#" + frag)
    return "".join(parts)
