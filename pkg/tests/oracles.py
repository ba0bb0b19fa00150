"""Reference implementations the library is checked against.

These are deliberately naive: slow, obviously correct, and independent of
the library's own search code.
"""

import itertools

from rdfmsg.terms import BlankNode, DefaultGraph, Iri, Literal, Quad


def _plain(t):
    if isinstance(t, BlankNode):
        return ("b", t.label)
    return t


def brute_isomorphic(a, b) -> bool:
    """Try every bijection between the two messages' blank nodes."""
    qa = {tuple(map(_plain, q.terms())) for q in a.quads}
    qb = {tuple(map(_plain, q.terms())) for q in b.quads}
    if len(qa) != len(qb):
        return False
    na = sorted({t for q in qa for t in q if isinstance(t, tuple)})
    nb = sorted({t for q in qb for t in q if isinstance(t, tuple)})
    if len(na) != len(nb):
        return False
    for perm in itertools.permutations(nb):
        mapping = dict(zip(na, perm))
        if {tuple(mapping.get(t, t) if isinstance(t, tuple) else t for t in q) for q in qa} == qb:
            return True
    return False


def from_rdflib(dataset):
    """Quads of an rdflib Dataset as library Quads (blank labels prefixed to stay distinct)."""
    import rdflib

    def term(t):
        if isinstance(t, rdflib.BNode):
            return BlankNode("r" + str(t))
        if isinstance(t, rdflib.URIRef):
            return Iri(str(t))
        if isinstance(t, rdflib.Literal):
            if t.language:
                return Literal(str(t), language=t.language)
            if t.datatype is not None:
                return Literal(str(t), Iri(str(t.datatype)))
            return Literal(str(t))
        raise TypeError(t)

    quads = []
    for s, p, o, g in dataset.quads((None, None, None, None)):
        ident = getattr(g, "identifier", g)
        default = ident is None or str(ident) == "urn:x-rdflib:default"
        quads.append(Quad(term(s), term(p), term(o), DefaultGraph() if default else term(ident)))
    return quads


def drop_plus_sign(m):
    """rdflib's Turtle reader drops a leading '+' from integer tokens; mirror that."""
    from rdfmsg.message import Message
    from rdfmsg.terms import XSD_INTEGER

    def fix(t):
        if isinstance(t, Literal) and t.datatype == XSD_INTEGER and t.lexical.startswith("+"):
            return Literal(t.lexical[1:], XSD_INTEGER)
        return t

    return Message([q.map_terms(fix) for q in m.quads])
