"""Messages: immutable, possibly empty, duplicate-free quad collections.

Each message owns a scope token. Constructing a message stamps every blank
node it contains with that token, which is what keeps ``_:b0`` in one message
apart from ``_:b0`` in the next.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from typing import Iterable, Iterator, Sequence

from .errors import InvalidBase, MixedScope
from .terms import BlankNode, Iri, Quad, iri_problem

_scopes = itertools.count(1)

SKOLEM_PATH = "/.well-known/genid/"
_MESSAGE_ID_RE = re.compile(r"[A-Za-z0-9._~\-]+")


class Message:
    """One communicative act: an ordered, duplicate-free sequence of quads.

    Equality is identity; use :func:`message_isomorphic` to compare content.
    """

    __slots__ = ("_quads", "_scope")

    def __init__(self, quads: Iterable[Quad] = ()):
        quads = list(quads)
        prior = None
        for q in quads:
            for t in (q.subject, q.object, q.graph):
                if isinstance(t, BlankNode) and t.scope is not None:
                    if prior is None:
                        prior = t.scope
                    elif t.scope != prior:
                        raise MixedScope(
                            f"blank nodes from scopes {prior} and {t.scope} in one message"
                        )
        scope = next(_scopes)
        nodes: dict[str, BlankNode] = {}

        def rescope(t):
            if isinstance(t, BlankNode):
                node = nodes.get(t.label)
                if node is None:
                    node = nodes[t.label] = BlankNode(t.label, scope)
                return node
            return t

        deduped = {}
        for q in quads:
            if _has_blank(q):
                q = q.map_terms(rescope)
            deduped.setdefault(q, None)
        object.__setattr__(self, "_quads", tuple(deduped))
        object.__setattr__(self, "_scope", scope)

    def __setattr__(self, name, value):
        raise AttributeError("Message is immutable")

    @property
    def quads(self) -> tuple[Quad, ...]:
        return self._quads

    @property
    def scope(self) -> int:
        return self._scope

    def __len__(self):
        return len(self._quads)

    def __iter__(self) -> Iterator[Quad]:
        return iter(self._quads)

    def __contains__(self, quad):
        return quad in self._quads

    def __repr__(self):
        return f"<Message scope={self._scope} quads={len(self._quads)}>"

    def blank_nodes(self) -> list[BlankNode]:
        """Distinct blank nodes in first-occurrence order."""
        seen = {}
        for q in self._quads:
            for t in (q.subject, q.object, q.graph):
                if isinstance(t, BlankNode):
                    seen.setdefault(t, None)
        return list(seen)

    def unscoped(self) -> tuple[Quad, ...]:
        """Quads with scope tokens stripped, for label-exact comparisons."""
        return tuple(q.map_terms(_strip) if _has_blank(q) else q for q in self._quads)


def _strip(t):
    return t.unscoped() if isinstance(t, BlankNode) else t


def _has_blank(q: Quad) -> bool:
    return (
        isinstance(q.subject, BlankNode)
        or isinstance(q.object, BlankNode)
        or isinstance(q.graph, BlankNode)
    )


def new_message(quads: Sequence[Quad] = ()) -> Message:
    return Message(quads)


# -- isomorphism ----------------------------------------------------------------


def _signatures(m: Message) -> dict[BlankNode, frozenset]:
    patterns: dict[BlankNode, Counter] = {n: Counter() for n in m.blank_nodes()}
    for q in m.quads:
        terms = q.terms()
        for node in {t for t in terms if isinstance(t, BlankNode)}:
            shape = tuple(
                "SELF" if t == node else "BLANK" if isinstance(t, BlankNode) else t
                for t in terms
            )
            patterns[node][shape] += 1
    return {n: frozenset(c.items()) for n, c in patterns.items()}


def _refine(a: Message, b: Message) -> tuple[dict, dict]:
    """Colour refinement run jointly on both messages so colours are comparable."""
    palette: dict = {}
    intern = lambda key: palette.setdefault(key, len(palette))  # noqa: E731
    colours = [{n: intern(sig) for n, sig in _signatures(m).items()} for m in (a, b)]
    classes = len(set(colours[0].values()) | set(colours[1].values()))
    while True:
        refined = []
        for m, col in zip((a, b), colours):
            seen: dict[BlankNode, Counter] = {n: Counter() for n in col}
            for q in m.quads:
                terms = q.terms()
                shape = tuple(col[t] if isinstance(t, BlankNode) else t for t in terms)
                for pos, t in enumerate(terms):
                    if isinstance(t, BlankNode):
                        seen[t][(pos, shape)] += 1
            refined.append({n: intern((col[n], frozenset(seen[n].items()))) for n in col})
        count = len(set(refined[0].values()) | set(refined[1].values()))
        colours = refined
        if count == classes:
            return colours[0], colours[1]
        classes = count


def find_bijection(a: Message, b: Message) -> dict[BlankNode, BlankNode] | None:
    """Blank-node bijection mapping ``a`` onto ``b``, or None if none exists.

    Exhaustive backtracking over candidates of equal refined colour; every
    quad is checked as soon as all of its blank nodes are assigned.
    """
    if len(a) != len(b):
        return None
    target = set(b.quads)
    nodes_a, nodes_b = a.blank_nodes(), b.blank_nodes()
    if len(nodes_a) != len(nodes_b):
        return None
    if not nodes_a:
        return {} if set(a.quads) == target else None
    ground_a = {q for q in a.quads if not _has_blank(q)}
    if not ground_a <= target:
        return None
    col_a, col_b = _refine(a, b)
    if Counter(col_a.values()) != Counter(col_b.values()):
        return None
    by_colour: dict[int, list[BlankNode]] = {}
    for n in nodes_b:
        by_colour.setdefault(col_b[n], []).append(n)
    order = sorted(nodes_a, key=lambda n: len(by_colour[col_a[n]]))
    rank = {n: i for i, n in enumerate(order)}
    ready: list[list[Quad]] = [[] for _ in order]
    for q in a.quads:
        blanks = [rank[t] for t in q.terms() if isinstance(t, BlankNode)]
        if blanks:
            ready[max(blanks)].append(q)
    mapping: dict[BlankNode, BlankNode] = {}
    used: set[BlankNode] = set()
    sub = lambda t: mapping.get(t, t)  # noqa: E731

    def search(i: int) -> bool:
        if i == len(order):
            return True
        node = order[i]
        for cand in by_colour[col_a[node]]:
            if cand in used:
                continue
            mapping[node] = cand
            if all(q.map_terms(sub) in target for q in ready[i]):
                used.add(cand)
                if search(i + 1):
                    return True
                used.discard(cand)
            del mapping[node]
        return False

    return dict(mapping) if search(0) else None


def message_isomorphic(a: Message, b: Message) -> bool:
    return find_bijection(a, b) is not None


# -- skolemization and union ------------------------------------------------------


def skolem_iri(base: str, message_id: str, label: str) -> Iri:
    return Iri(f"{base.rstrip('/')}{SKOLEM_PATH}{message_id}/{label}")


def skolemize(m: Message, base: Iri | str, message_id: str) -> Message:
    """Replace every blank node by ``<base>/.well-known/genid/<message_id>/<label>``."""
    base = base.value if isinstance(base, Iri) else base
    problem = iri_problem(base)
    if problem or "#" in base or "?" in base:
        raise InvalidBase(f"skolemization base {base!r} is not an absolute IRI: {problem or 'has query or fragment'}")
    if not _MESSAGE_ID_RE.fullmatch(message_id) or message_id in (".", ".."):
        raise ValueError(f"message id {message_id!r} is not URL-path-safe")
    iris: dict[BlankNode, Iri] = {}

    def replace(t):
        if isinstance(t, BlankNode):
            iri = iris.get(t)
            if iri is None:
                iri = iris[t] = skolem_iri(base, message_id, t.label)
            return iri
        return t

    return Message(q.map_terms(replace) for q in m.quads)


def union(messages: Iterable[Message]) -> Message:
    """Merge messages explicitly, standardizing blank nodes apart.

    A label already taken by an earlier input is renamed ``<label>_m<k>``
    (``k`` = input index), so nodes from different inputs never merge.
    """
    used: set[str] = set()
    out: list[Quad] = []
    for k, m in enumerate(messages):
        nodes = m.blank_nodes()
        own = {n.label for n in nodes}
        rename: dict[BlankNode, BlankNode] = {}
        for n in nodes:
            label = n.label
            if label in used:
                label = f"{n.label}_m{k}"
                i = 2
                while label in used or label in own:
                    label = f"{n.label}_m{k}_{i}"
                    i += 1
            used.add(label)
            rename[n] = BlankNode(label)
        for q in m.quads:
            out.append(q.map_terms(lambda t: rename.get(t, t)) if rename else q)
    return Message(out)
