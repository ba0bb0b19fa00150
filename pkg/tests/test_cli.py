import subprocess
import sys

import pytest

from corpus import OBSERVATION, HEARTBEAT_STREAM, SOSA
from rdfmsg import cli
from rdfmsg.message import message_isomorphic
from rdfmsg.nqm import VERSION_LINE, nqm_dumps, parse_nqm
from rdfmsg.trigm import parse_trigm

RESULT_TIME = SOSA + "resultTime"


def run(*argv):
    return cli.main([str(a) for a in argv])


def run_process(*argv, stdin=b""):
    return subprocess.run([sys.executable, "-m", "rdfmsg", *map(str, argv)], input=stdin, capture_output=True)


@pytest.fixture
def files(tmp_path):
    (tmp_path / "l2.trigm").write_text(HEARTBEAT_STREAM)
    (tmp_path / "l1.trig").write_text(OBSERVATION)
    (tmp_path / "empty.trigm").write_text("")
    (tmp_path / "noversion.trigm").write_text(HEARTBEAT_STREAM.split("\n", 1)[1])
    reversed_msgs = parse_trigm(HEARTBEAT_STREAM)[::-1]
    (tmp_path / "reversed.nqm").write_bytes(nqm_dumps(reversed_msgs))
    return tmp_path


@pytest.fixture
def stream_log(files):
    path = files / "events"
    assert run_process("log", "append", path, stdin=nqm_dumps(parse_trigm(HEARTBEAT_STREAM))).returncode == 0
    return path


def test_validate(files, capsys):
    assert run("validate", files / "l2.trigm") == 0
    assert capsys.readouterr().out.strip() == "messages=3 quads=4 empty=1"


def test_validate_strict_failures(files, capsys):
    assert run("validate", "--strict-version", files / "empty.trigm") == 1
    assert "VersionMissing" in capsys.readouterr().err
    assert run("validate", "--strict-version", files / "noversion.trigm") == 1
    err = capsys.readouterr().err
    assert ":1:1: VersionMissing" in err
    assert run("validate", files / "empty.trigm") == 0


def test_validate_syntax_error_and_missing_file(files, capsys):
    (files / "bad.trigm").write_text('VERSION "1.2-messages"\n<http://a/s> _:p 1 .\n')
    assert run("validate", files / "bad.trigm") == 1
    assert "2:14: PredicateBlankNode" in capsys.readouterr().err
    assert run("validate", files / "missing.trigm") == 3


def test_validate_stdin():
    result = run_process("validate", "-", "--format", "nqm", stdin=nqm_dumps(parse_trigm(HEARTBEAT_STREAM)))
    assert result.returncode == 0 and result.stdout.strip() == b"messages=3 quads=4 empty=1"


def test_convert_round_trip(files):
    assert run("convert", files / "l2.trigm", files / "out.nqm") == 0
    assert run("convert", files / "out.nqm", files / "back.trigm") == 0
    original = parse_trigm(HEARTBEAT_STREAM)
    for produced in (parse_nqm((files / "out.nqm").read_bytes()), parse_trigm((files / "back.trigm").read_bytes())):
        assert len(produced) == 3
        assert all(message_isomorphic(a, b) for a, b in zip(original, produced))


def test_convert_keeps_prefixes(files):
    assert run("convert", files / "l2.trigm", files / "copy.trigm") == 0
    assert "sosa:hasSimpleResult 22 ." in (files / "copy.trigm").read_text()


def test_convert_zero_messages(files):
    (files / "zero.trigm").write_text('VERSION "1.2-messages"\n')
    assert run("convert", files / "zero.trigm", files / "zero.nqm") == 0
    assert (files / "zero.nqm").read_bytes() == VERSION_LINE


def test_format_fallback_env(files, monkeypatch):
    (files / "data.txt").write_bytes(nqm_dumps(parse_trigm(HEARTBEAT_STREAM)))
    monkeypatch.setenv("RDFMSG_DEFAULT_FORMAT", "nqm")
    assert run("validate", files / "data.txt") == 0
    monkeypatch.setenv("RDFMSG_DEFAULT_FORMAT", "turtle")
    assert run("validate", files / "data.txt") == 2
    assert cli.detect_format("x.nq", None) == "nqm"
    assert cli.detect_format("x.nqm", "trigm") == "trigm"


def test_split(files):
    out = files / "parts"
    assert run("split", files / "l2.trigm", "--out-dir", out) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["msg-000000.trig", "msg-000001.trig", "msg-000002.trig"]
    assert (out / "msg-000001.trig").read_bytes() == b""
    originals = parse_trigm(HEARTBEAT_STREAM)
    for name, original in zip(names, originals):
        parsed = parse_trigm((out / name).read_bytes(), require_version=False)
        if len(original):
            assert len(parsed) == 1 and message_isomorphic(parsed[0], original)
        else:
            assert parsed == []
    assert run("split", files / "l2.trigm", "--out-dir", out) == 2


def test_split_empty_log(files):
    (files / "zero.trigm").write_text('VERSION "1.2-messages"\n')
    assert run("split", files / "zero.trigm", "--out-dir", files / "none") == 0
    assert list((files / "none").iterdir()) == []


def test_log_replay_read_verify(stream_log, capsysbinary):
    assert run("log", "replay", stream_log) == 0
    first = capsysbinary.readouterr().out
    assert [len(m) for m in parse_nqm(first)] == [2, 0, 2]
    assert run("log", "replay", stream_log) == 0
    assert capsysbinary.readouterr().out == first
    assert run("log", "read", stream_log, "--seq", 1) == 0
    assert capsysbinary.readouterr().out == b'VERSION "1.2-messages"\nMESSAGE\n'
    assert run("log", "replay", stream_log, "--from", 1, "--to", 2) == 0
    assert [len(m) for m in parse_nqm(capsysbinary.readouterr().out)] == [0, 2]
    assert run("log", "verify", stream_log) == 0


def test_log_errors(stream_log, capsys):
    assert run("log", "read", stream_log, "--seq", 7) == 2
    assert run("log", "replay", stream_log, "--from", 2, "--to", 1) == 2
    idx = stream_log.with_name("events.nqm.idx")
    lines = idx.read_text().splitlines(keepends=True)
    seq, off, rest = lines[2].split("\t", 2)
    lines[2] = f"{seq}\t{int(off) + 1}\t{rest}"
    idx.write_text("".join(lines))
    assert run("log", "verify", stream_log) == 3
    assert run("log", "read", stream_log.with_name("absent"), "--seq", 0) == 3


def test_log_verify_detects_count_drift(stream_log):
    idx = stream_log.with_name("events.nqm.idx")
    idx.write_text(idx.read_text().replace("\t2\n", "\t5\n", 1))
    assert run("log", "verify", stream_log) == 3


def test_paced_replay(files, monkeypatch, capsysbinary):
    path = files / "paced"
    data = nqm_dumps(parse_trigm(HEARTBEAT_STREAM))
    assert run_process("log", "append", path, "--chronology-predicate", RESULT_TIME, stdin=data).returncode == 0
    delays = []
    monkeypatch.setattr(cli, "_sleep", delays.append)
    assert run("log", "replay", path, "--pace", "chronology", "--speed", 10) == 0
    assert delays == [30.0]
    assert len(parse_nqm(capsysbinary.readouterr().out)) == 3
    assert run("log", "replay", path, "--pace", "chronology", "--speed", 0) == 2


def test_check_order(files, stream_log, capsys):
    assert run("check-order", files / "l2.trigm", "--chronology-predicate", RESULT_TIME) == 0
    assert run("check-order", files / "reversed.nqm", "--chronology-predicate", RESULT_TIME) == 1
    out = capsys.readouterr().out.strip().splitlines()
    assert out == ["(0, 2, 2026-05-12T18:25:00Z, 2026-05-12T18:20:00Z)"]
    assert run("check-order", stream_log, "--log", "--chronology-predicate", RESULT_TIME) == 0
    assert run("check-order", files / "l2.trigm", "--profile", "sosa") == 0
    assert run("check-order", files / "l2.trigm", "--order", "version") == 0
    assert run("check-order", files / "l2.trigm", "--chronology-predicate", "not an iri") == 2


def test_check_order_single_message(files):
    (files / "one.trigm").write_text(HEARTBEAT_STREAM.split("MESSAGE")[0])
    assert run("check-order", files / "one.trigm", "--profile", "sosa") == 0


def test_skolemize(files, capsysbinary):
    assert run("skolemize", files / "l2.trigm", "--base", "http://example.org/", "--to", "nqm") == 0
    out = capsysbinary.readouterr().out
    msgs = parse_nqm(out)
    assert [len(m) for m in msgs] == [2, 0, 2]
    assert b"_:" not in out
    assert msgs[0].quads[0].subject.value == "http://example.org/.well-known/genid/000000/b0"
    assert msgs[2].quads[0].subject.value == "http://example.org/.well-known/genid/000002/b0"
    assert run("skolemize", files / "l1.trig", "--base", "http://example.org/") == 0
    (m,) = parse_trigm(capsysbinary.readouterr().out)
    assert all(not hasattr(q.graph, "label") for q in m.quads)
    assert run("skolemize", files / "l2.trigm", "--base", "http://example.org/", "--id-template", "hash") == 0
    assert b"_:" not in capsysbinary.readouterr().out
    assert run("skolemize", files / "l2.trigm", "--base", "relative/") == 2
    assert run("skolemize", files / "l2.trigm", "--base", "http://e/#x") == 2


def test_skolemize_pipe():
    zero = b'VERSION "1.2-messages"\n'
    result = run_process("skolemize", "-", "--base", "http://example.org/", "--format", "nqm", "--to", "nqm", stdin=zero)
    assert result.returncode == 0 and result.stdout == zero


def test_usage_errors(capsys):
    assert run() == 2
    assert run("frobnicate") == 2
    assert run("--version") == 0
