"""Acceptance suite: ten end-to-end criteria, each with a wall-clock budget.

Run ``python3 tests/test_acceptance.py`` (or ``pytest tests/test_acceptance.py``)
to get one PASS/FAIL line per criterion.
"""

import contextlib
import random
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import OBSERVATION, HEARTBEAT_STREAM, PROV, SOSA, XSD  # noqa: E402
from generators import random_chunking, random_message, random_messages, random_trigm  # noqa: E402
from oracles import brute_isomorphic  # noqa: E402
from rdfmsg import (  # noqa: E402
    SOSA as SOSA_PROFILE,
    BlankNode,
    DefaultGraph,
    Iri,
    Literal,
    Message,
    MessageReady,
    Quad,
    check_order,
    dumps_trigm,
    log_create,
    log_open,
    merge_by_chronology,
    nqm_dumps,
    parse_nqm,
    parse_trigm,
    parser_new,
    skolemize,
    union,
)
from rdfmsg.logstore import index_path_for  # noqa: E402

GENID = "/.well-known/genid/"
RESULTS: dict[int, tuple[str, str, float]] = {}


@contextlib.contextmanager
def criterion(number: int, title: str, budget: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        RESULTS[number] = ("FAIL", title, time.perf_counter() - start)
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    RESULTS[number] = ("PASS" if ok else "FAIL", title, elapsed)
    assert ok, f"took {elapsed:.2f}s, budget {budget}s"


def summary_lines() -> list[str]:
    return [
        f"criterion {n:2d} {status}  {title} ({elapsed:.2f}s)" for n, (status, title, elapsed) in sorted(RESULTS.items())
    ]


def events(parser, data):
    return [e for e in parser.feed(data) if isinstance(e, MessageReady)]


def all_isomorphic(xs, ys):
    return len(xs) == len(ys) and all(brute_isomorphic(a, b) for a, b in zip(xs, ys))


def test_01_single_observation_fidelity():
    with criterion(1, "single observation fidelity", 1.0):
        (m,) = parse_trigm(OBSERVATION, require_version=False)
        assert len(m) == 4
        default = [q for q in m.quads if isinstance(q.graph, DefaultGraph)]
        named = [q for q in m.quads if not isinstance(q.graph, DefaultGraph)]
        assert len(default) == 1 and len(named) == 3
        assert default[0].predicate == Iri(PROV + "generatedAtTime")
        assert isinstance(default[0].subject, BlankNode)
        assert all(q.graph == default[0].subject for q in named)


def test_02_heartbeat_stream_fidelity():
    with criterion(2, "heartbeat stream fidelity", 1.0):
        msgs = parse_trigm(HEARTBEAT_STREAM)
        assert [len(m) for m in msgs] == [2, 0, 2]
        (n1,), (n3,) = msgs[0].blank_nodes(), msgs[2].blank_nodes()
        assert n1.label == n3.label == "b0"
        assert n1 != n3


def test_03_incremental_emission():
    with criterion(3, "incremental emission", 1.0):
        data = HEARTBEAT_STREAM.encode()
        first_message = data.index(b"\nMESSAGE") + 1
        expected = data.index(b"\n", first_message)
        parser = parser_new()
        emitted_at = []
        for i in range(len(data)):
            for _ in events(parser, data[i : i + 1]):
                emitted_at.append(i)
                assert parser.pending_quad_count == 0
        assert emitted_at[0] == expected
        assert len(emitted_at) == 2
        tail = [e for e in parser.finish() if isinstance(e, MessageReady)]
        assert len(tail) == 1 and parser.pending_quad_count == 0


def _emitted(chunks):
    parser = parser_new()
    out = []
    for chunk in chunks:
        out += events(parser, chunk)
    out += [e for e in parser.finish() if isinstance(e, MessageReady)]
    return [(e.message.unscoped(), e.start, e.end) for e in out]


def test_04_chunking_invariance():
    with criterion(4, "chunking invariance (200 docs x 5 chunkings)", 30.0):
        rng = random.Random(2026)
        for _ in range(200):
            data = random_trigm(rng, max_messages=10, max_quads=6).encode()
            whole = _emitted([data])
            assert len(whole) <= 10 and all(len(m) <= 6 for m, _, _ in whole)
            for _ in range(5):
                assert _emitted(random_chunking(rng, data)) == whole


def test_05_round_trip():
    with criterion(5, "round-trip trigm / nqm / trigm->nqm->trigm (500 sequences)", 60.0):
        rng = random.Random(7)
        for _ in range(500):
            msgs = random_messages(rng, max_messages=8)
            via_trigm = parse_trigm(dumps_trigm(msgs))
            via_nqm = parse_nqm(nqm_dumps(msgs))
            converted = parse_trigm(dumps_trigm(parse_nqm(nqm_dumps(via_trigm))))
            for produced in (via_trigm, via_nqm, converted):
                assert all_isomorphic(msgs, produced)


def test_06_log_replay(tmp_path):
    with criterion(6, "log replay, read(i) and index re-derivation (1000 messages)", 60.0):
        rng = random.Random(11)
        msgs = [random_message(rng, p_empty=0.15) for _ in range(1000)]
        assert sum(len(m) == 0 for m in msgs) >= 100
        path = tmp_path / "big"
        with log_create(path) as log:
            for k, m in enumerate(msgs):
                assert log.append(m) == k
        with log_open(path) as log:
            replayed = [m for _, m in log.replay()]
            assert [seq for seq, _ in log.replay()] == list(range(1000))
            assert all_isomorphic(msgs, replayed)
            for i in range(len(msgs)):
                assert log.read(i).unscoped() == replayed[i].unscoped()
            assert log.rederive_index() == index_path_for(path).read_text(encoding="utf-8")


def test_07_crash_consistency(tmp_path):
    with criterion(7, "crash consistency (50 truncation points)", 30.0):
        rng = random.Random(3)
        msgs = [random_message(rng) for _ in range(40)]
        src = tmp_path / "src"
        with log_create(src, fsync=False) as log:
            for m in msgs:
                log.append(m)
            ends = [r.end for r in log.records]
        data = (tmp_path / "src.nqm").read_bytes()
        index = (tmp_path / "src.nqm.idx").read_bytes()
        cuts = rng.sample(range(len(data) + 1), 50)
        extra = random_message(rng)
        for n, cut in enumerate(cuts):
            work = tmp_path / f"cut{n}"
            (tmp_path / f"cut{n}.nqm").write_bytes(data[:cut])
            (tmp_path / f"cut{n}.nqm.idx").write_bytes(index)
            complete = sum(end <= cut for end in ends)
            with log_open(work) as reader:
                exposed = [m for _, m in reader.replay()]
            assert all_isomorphic(msgs[:complete], exposed)
            with log_open(work, "a") as writer:
                assert writer.append(extra) == complete
            with log_open(work, paranoid=True) as reader:
                assert all_isomorphic(msgs[:complete] + [extra], [m for _, m in reader.replay()])


def _stamped(t: int, value: str) -> Message:
    stamp = f"2026-05-12T{t // 3600:02d}:{t // 60 % 60:02d}:{t % 60:02d}Z"
    return Message(
        [
            Quad(BlankNode("b0"), Iri(SOSA + "resultTime"), Literal(stamp, Iri(XSD + "dateTime")), DefaultGraph()),
            Quad(BlankNode("b0"), Iri(SOSA + "hasSimpleResult"), Literal(value), DefaultGraph()),
        ]
    )


def test_08_chronology():
    with criterion(8, "chronology check and 3-way merge", 10.0):
        msgs = parse_trigm(HEARTBEAT_STREAM)
        assert check_order(msgs, SOSA_PROFILE) == []
        violations = check_order(msgs[::-1], SOSA_PROFILE)
        assert len(violations) == 1
        rng = random.Random(8)
        for _ in range(20):
            streams = []
            for s in range(3):
                times = sorted(rng.randrange(86400) for _ in range(rng.randint(0, 25)))
                stream = [_stamped(t, f"{s}-{k}") for k, t in enumerate(times)]
                for _ in range(rng.randint(0, 3)):
                    stream.insert(rng.randint(0, len(stream)), Message())
                streams.append(stream)
            merged = list(merge_by_chronology(streams, SOSA_PROFILE))
            assert check_order(merged, SOSA_PROFILE) == []
            assert Counter(map(id, merged)) == Counter(id(m) for s in streams for m in s)


def test_09_skolemization():
    with criterion(9, "skolemization of random logs", 10.0):
        rng = random.Random(9)
        for _ in range(100):
            msgs = random_messages(rng, max_messages=10)
            seen: dict[str, int] = {}
            for seq, m in enumerate(msgs):
                sk = skolemize(m, "http://example.org/", f"{seq:06d}")
                assert sk.blank_nodes() == []
                assert len(sk) == len(m)
                prefix = f"http://example.org/.well-known/genid/{seq:06d}/"
                minted = {t.value for q in sk.quads for t in q.terms() if isinstance(t, Iri) and GENID in t.value}
                assert len(minted) == len(m.blank_nodes())
                assert all(iri.startswith(prefix) for iri in minted)
                for iri in minted:
                    assert seen.setdefault(iri, seq) == seq


def test_10_union_scoping():
    with criterion(10, "union scoping", 1.0):
        m1, _, m3 = parse_trigm(HEARTBEAT_STREAM)
        u = union([m1, m3])
        assert len(u) == 4 and len(u.blank_nodes()) == 2
        shared = Message([Quad(BlankNode("b0"), q.predicate, q.object, q.graph) for q in u.quads])
        assert len(shared) == 4 and len(shared.blank_nodes()) == 1
        two_quad = [m1, m3, shared] + [m for m in parse_trigm(dumps_trigm([m1, m3]))]
        for other in two_quad:
            assert not brute_isomorphic(u, other)


if __name__ == "__main__":
    # the summary lines come from the conftest terminal hook
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
