import random
import re

import pytest
import rdflib
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import EX, OBSERVATION, HEARTBEAT_STREAM, PROV, SOSA
from generators import PREFIXES, random_chunking, random_messages, random_trigm
from oracles import drop_plus_sign, from_rdflib
from rdfmsg.errors import ErrorKind, MessageSyntaxError
from rdfmsg.events import END_OF_LOG, MessageReady
from rdfmsg.message import Message, message_isomorphic
from rdfmsg.terms import RDF_FIRST, RDF_NIL, RDF_REST, BlankNode, DefaultGraph, Iri, Literal
from rdfmsg.trigm import TrigMessageParser, dumps_trig, dumps_trigm, parse_trigm, parser_new, trigm_parse

HEAD = 'VERSION "1.2-messages"\nPREFIX ex: <http://example.org/>\n'


def ready(parser, data):
    return [e for e in parser.feed(data) if isinstance(e, MessageReady)]


def emitted(data: bytes, chunks):
    parser = TrigMessageParser()
    out = []
    for chunk in chunks:
        out += [(e.message.unscoped(), e.start, e.end) for e in parser.feed(chunk) if isinstance(e, MessageReady)]
    out += [(e.message.unscoped(), e.start, e.end) for e in parser.finish() if isinstance(e, MessageReady)]
    return out


def test_observation_structure():
    (m,) = parse_trigm(OBSERVATION, require_version=False)
    default = [q for q in m.quads if isinstance(q.graph, DefaultGraph)]
    named = [q for q in m.quads if not isinstance(q.graph, DefaultGraph)]
    assert len(default) == 1 and len(named) == 3
    assert default[0].predicate == Iri(PROV + "generatedAtTime")
    assert {q.graph for q in named} == {default[0].subject}
    assert Literal("21.4", Iri("http://www.w3.org/2001/XMLSchema#decimal")) in {q.object for q in named}


def test_heartbeat_stream_messages_and_scoping():
    msgs = parse_trigm(HEARTBEAT_STREAM)
    assert [len(m) for m in msgs] == [2, 0, 2]
    b1, b3 = msgs[0].blank_nodes(), msgs[2].blank_nodes()
    assert [n.label for n in b1] == [n.label for n in b3] == ["b0"]
    assert b1[0] != b3[0]


def test_incremental_emission_byte_by_byte():
    data = HEARTBEAT_STREAM.encode()
    first_newline = data.index(b"MESSAGE") + data[data.index(b"MESSAGE") :].index(b"\n")
    parser = parser_new()
    seen = []
    for i in range(len(data)):
        for ev in ready(parser, data[i : i + 1]):
            seen.append(i)
            assert parser.pending_quad_count == 0
    assert seen[0] == first_newline
    tail = parser.finish()
    assert isinstance(tail[0], MessageReady) and tail[-1] is END_OF_LOG


def test_message_spans_tile_the_document():
    data = HEARTBEAT_STREAM.encode()
    spans = [(s, e) for _, s, e in emitted(data, [data])]
    assert spans[0][0] == data.index(b"\n") - len(" # Prefixes omitted")
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))
    assert spans[-1][1] == len(data)


@pytest.mark.parametrize(
    "doc,count",
    [
        (HEAD, 0),
        (HEAD + "MESSAGE\n", 1),
        (HEAD + "MESSAGE\nMESSAGE\n", 2),
        (HEAD + "ex:s ex:p ex:o .", 1),
        (HEAD + "ex:s ex:p ex:o .\nMESSAGE\nPREFIX ex2: <http://e2/>\n", 1),
        (HEAD + "ex:s ex:p ex:o . MESSAGE\n", 1),
    ],
)
def test_terminator_semantics(doc, count):
    assert len(parse_trigm(doc)) == count


def test_directives_persist_across_messages():
    doc = HEAD + "ex:a ex:p 1 .\nMESSAGE\n@prefix ex: <http://other/> .\nex:a ex:p 2 .\nMESSAGE\nex:a ex:p 3 .\n"
    subjects = [m.quads[0].subject.value for m in parse_trigm(doc)]
    assert subjects == [EX + "a", "http://other/a", "http://other/a"]


def test_base_resolution():
    doc = 'VERSION "1.2-messages"\nBASE <http://ex.org/dir/>\n<a> <../p> <#frag> .\n'
    (m,) = parse_trigm(doc)
    q = m.quads[0]
    assert (q.subject.value, q.predicate.value, q.object.value) == (
        "http://ex.org/dir/a",
        "http://ex.org/p",
        "http://ex.org/dir/#frag",
    )


def test_anonymous_nodes_avoid_explicit_labels():
    (m,) = parse_trigm(HEAD + "_:b0 ex:p [ ex:q ( 1 ) ] .\n")
    labels = [n.label for n in m.blank_nodes()]
    assert len(labels) == len(set(labels)) == 3
    assert RDF_FIRST in {q.predicate for q in m.quads} and RDF_REST in {q.predicate for q in m.quads}
    assert RDF_NIL in {q.object for q in m.quads}


def test_graph_forms():
    doc = HEAD + "GRAPH ex:g { ex:s ex:p 1 }\n_:g { ex:s ex:p 2 . }\n{ ex:s ex:p 3 }\n[] { ex:s ex:p 4 }\n"
    (m,) = parse_trigm(doc)
    graphs = [q.graph for q in m.quads]
    assert graphs[0] == Iri(EX + "g")
    assert isinstance(graphs[1], BlankNode) and isinstance(graphs[3], BlankNode) and graphs[1] != graphs[3]
    assert graphs[2] == DefaultGraph()


def test_literal_forms():
    doc = HEAD + "ex:s ex:p 'a', \"\"\"b\n\"\"\", '''c''', \"d\"@en-GB, -1, .5, 1e3, true, \"e\"^^ex:dt .\n"
    (m,) = parse_trigm(doc)
    got = [(o.lexical, o.datatype.value.rsplit("#", 1)[-1].rsplit("/", 1)[-1], o.language) for o in (q.object for q in m.quads)]
    assert got == [
        ("a", "string", None),
        ("b\n", "string", None),
        ("c", "string", None),
        ("d", "langString", "en-GB"),
        ("-1", "integer", None),
        (".5", "decimal", None),
        ("1e3", "double", None),
        ("true", "boolean", None),
        ("e", "dt", None),
    ]


@pytest.mark.parametrize(
    "body,kind,line,col",
    [
        ("ex:s _:p ex:o .", ErrorKind.PREDICATE_BLANK_NODE, 3, 6),
        ("ex:s ex:p nope:o .", ErrorKind.BAD_IRI, 3, 11),
        ("ex:s ex:p <rel> .", ErrorKind.BAD_IRI, 3, 11),
        ("ex:s ex:p <a b> .", ErrorKind.BAD_IRI, 3, 11),
        ('ex:s ex:p "x\\q" .', ErrorKind.BAD_LITERAL, 3, 11),
        ('ex:s ex:p "x"@ .', ErrorKind.BAD_LITERAL, 3, 14),
        ('"lit" ex:p ex:o .', ErrorKind.UNEXPECTED_TOKEN, 3, 1),
        ("ex:s ex:p ex:o }", ErrorKind.UNEXPECTED_TOKEN, 3, 16),
        ("ex:s ex:p ex:o", ErrorKind.UNEXPECTED_TOKEN, 3, 11),
        ("MESSAGE ex:s\n", ErrorKind.UNEXPECTED_TOKEN, 3, 9),
        ("message\n", ErrorKind.UNEXPECTED_TOKEN, 3, 1),
        ('ex:s ex:p ex:o .\nVERSION "1.2-messages"\n', ErrorKind.UNEXPECTED_TOKEN, 4, 1),
    ],
)
def test_errors(body, kind, line, col):
    with pytest.raises(MessageSyntaxError) as info:
        parse_trigm(HEAD + body)
    assert (info.value.kind, info.value.line, info.value.column) == (kind, line, col)


def test_version_rules():
    with pytest.raises(MessageSyntaxError) as info:
        parse_trigm("")
    assert info.value.kind is ErrorKind.VERSION_MISSING
    with pytest.raises(MessageSyntaxError) as info:
        parse_trigm("PREFIX ex: <http://e/>\nex:s ex:p ex:o .\n")
    assert (info.value.kind, info.value.line) == (ErrorKind.VERSION_MISSING, 1)
    with pytest.raises(MessageSyntaxError) as info:
        parse_trigm('VERSION "1.1"\n')
    assert info.value.kind is ErrorKind.VERSION_UNSUPPORTED
    assert parse_trigm("", require_version=False) == []
    assert len(parse_trigm('VERSION "2.0"\nMESSAGE\n', require_version=False)) == 1


def test_parser_rejects_use_after_error_or_finish():
    parser = TrigMessageParser()
    with pytest.raises(MessageSyntaxError):
        parser.feed(b"nonsense .\n")
    with pytest.raises(MessageSyntaxError):
        parser.feed(b"")
    done = TrigMessageParser(require_version=False)
    done.finish()
    with pytest.raises(RuntimeError):
        done.feed(b"")


def test_stream_reader_source():
    chunks = (HEARTBEAT_STREAM.encode()[i : i + 7] for i in range(0, len(HEARTBEAT_STREAM), 7))
    assert [len(m) for m in trigm_parse(chunks)] == [2, 0, 2]


def test_writer_uses_prefixes_and_shorthand():
    msgs = parse_trigm(HEARTBEAT_STREAM)
    text = dumps_trigm(msgs, {"sosa": SOSA, "xsd": "http://www.w3.org/2001/XMLSchema#"}).decode()
    assert text.startswith('VERSION "1.2-messages"\nPREFIX sosa: <http://www.w3.org/ns/sosa/>\n')
    assert "sosa:hasSimpleResult 22 ." in text
    assert text.count("MESSAGE\n") == 3
    assert all(message_isomorphic(a, b) for a, b in zip(parse_trigm(text), msgs))


def test_plain_trig_output():
    assert dumps_trig(Message()) == b""
    (m,) = parse_trigm(OBSERVATION, require_version=False)
    text = dumps_trig(m, {"ex": EX}).decode()
    assert "VERSION" not in text and "MESSAGE" not in text
    (back,) = parse_trigm(text, require_version=False)
    assert message_isomorphic(back, m)


def test_writer_rejects_bad_prefixes():
    with pytest.raises(ValueError):
        dumps_trigm([], {"1bad": EX})
    with pytest.raises(ValueError):
        dumps_trigm([], {"ok": "relative"})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_chunking_invariance(seed):
    rng = random.Random(seed)
    data = random_trigm(rng).encode()
    whole = emitted(data, [data])
    for _ in range(3):
        assert emitted(data, random_chunking(rng, data)) == whole


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_write_parse_round_trip(seed):
    msgs = random_messages(random.Random(seed))
    for prefixes in (None, PREFIXES):
        back = parse_trigm(dumps_trigm(msgs, prefixes))
        assert len(back) == len(msgs)
        assert all(message_isomorphic(a, b) for a, b in zip(msgs, back))


_MESSAGE_LINE = re.compile(r"^[ \t]*MESSAGE[^\n]*(?:\n|$)", re.M)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_messages_match_rdflib(seed):
    """Each message, parsed alone as plain TriG by rdflib, is isomorphic to ours."""
    doc = random_trigm(random.Random(seed))
    lines = doc.split("\n")
    header, body = "\n".join(lines[1:4]) + "\n", "\n".join(lines[4:])
    ours = parse_trigm(doc)
    for segment, m in zip(_MESSAGE_LINE.split(body), ours):
        ds = rdflib.Dataset()
        ds.parse(data=header + segment, format="trig")
        assert message_isomorphic(Message(from_rdflib(ds)), drop_plus_sign(m))
