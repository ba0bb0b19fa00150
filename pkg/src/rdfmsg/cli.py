"""``rdfmsg``: validate, convert, split, archive and replay message streams.

Exit statuses: 0 success, 1 validation or ordering failure, 2 usage error,
3 I/O failure or log corruption.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import itertools
import os
import sys
import time
from pathlib import Path
from typing import BinaryIO, Iterator

from . import __version__
from .errors import (
    IndexCorrupt,
    InvalidBase,
    LogError,
    MessageSyntaxError,
    NotFound,
    OutOfRange,
    ProfileError,
)
from .events import MessageReady
from .logstore import data_path_for, index_path_for, log_create, log_open
from .message import Message, skolemize
from .nqm import VERSION_LINE, NQuadsMessageParser, format_message, nqm_write
from .profiles import BUILTIN_PROFILES, PROV, GraphScope, Profile, check_order, extract_instant, load_profile
from .terms import Iri
from .trigm import TrigMessageParser, dumps_trig, write_log

OK, FAILED, USAGE, IO_ERROR = 0, 1, 2, 3
FORMATS = ("trigm", "nqm")
_EXTENSIONS = {".trigm": "trigm", ".trig": "trigm", ".nqm": "nqm", ".nq": "nqm"}
_READ_SIZE = 1 << 16

# Replaced in tests so paced replay runs instantly.
_sleep = time.sleep


class UsageError(Exception):
    pass


def _err(text: str):
    print(f"rdfmsg: {text}", file=sys.stderr)


def detect_format(name: str, flag: str | None) -> str:
    """Explicit flag, then file extension, then ``RDFMSG_DEFAULT_FORMAT``, then trigm."""
    if flag:
        return flag
    ext = _EXTENSIONS.get(Path(name).suffix.lower()) if name != "-" else None
    if ext:
        return ext
    env = os.environ.get("RDFMSG_DEFAULT_FORMAT", "").strip().lower()
    if env:
        if env not in FORMATS:
            raise UsageError(f"RDFMSG_DEFAULT_FORMAT must be one of {', '.join(FORMATS)}, not {env!r}")
        return env
    return "trigm"


def _open_in(name: str) -> BinaryIO:
    return sys.stdin.buffer if name == "-" else open(name, "rb")


def _open_out(name: str) -> BinaryIO:
    return sys.stdout.buffer if name == "-" else open(name, "wb")


def _close(stream):
    if stream not in (sys.stdin.buffer, sys.stdout.buffer):
        stream.close()
    else:
        stream.flush()


class MessageSource:
    """Streams messages out of a file in either format, remembering its prefixes."""

    def __init__(self, name: str, fmt: str, strict: bool):
        self.name = name
        self.fmt = fmt
        self.parser = TrigMessageParser(strict) if fmt == "trigm" else NQuadsMessageParser(strict)

    @property
    def prefixes(self) -> dict[str, str]:
        return dict(getattr(self.parser, "prefixes", {}))

    def __iter__(self) -> Iterator[Message]:
        stream = _open_in(self.name)
        try:
            read = getattr(stream, "read1", stream.read)
            while chunk := read(_READ_SIZE):
                for ev in self.parser.feed(chunk):
                    if isinstance(ev, MessageReady):
                        yield ev.message
            for ev in self.parser.finish():
                if isinstance(ev, MessageReady):
                    yield ev.message
        finally:
            if stream is not sys.stdin.buffer:
                stream.close()


def _source(args, name=None, flag=None) -> MessageSource:
    name = args.file if name is None else name
    fmt = detect_format(name, flag if flag is not None else getattr(args, "format", None))
    return MessageSource(name, fmt, getattr(args, "strict_version", False))


def _write_stream(messages, source: MessageSource, sink: BinaryIO, fmt: str):
    if fmt == "nqm":
        nqm_write(messages, sink)
        return
    # Pull the first message so prefixes declared ahead of it are known.
    it = iter(messages)
    head = list(itertools.islice(it, 1))
    write_log(itertools.chain(head, it), sink, source.prefixes)


def _iri_arg(text: str) -> Iri:
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        text = text[1:-1]
    try:
        return Iri(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _profile(args, default: Profile = PROV) -> Profile:
    profile = default
    name = getattr(args, "profile", None)
    if name:
        if name in BUILTIN_PROFILES:
            profile = BUILTIN_PROFILES[name]
        else:
            try:
                profile = load_profile(name)
            except (OSError, ValueError) as e:
                raise UsageError(f"cannot load profile {name!r}: {e}") from None
    changes = {}
    if getattr(args, "chronology_predicate", None):
        changes["chronology_predicate"] = _iri_arg(args.chronology_predicate)
    if getattr(args, "version_predicate", None):
        changes["version_predicate"] = _iri_arg(args.version_predicate)
    if getattr(args, "scope", None):
        changes["graph_scope"] = GraphScope(args.scope)
    if changes:
        profile = dataclasses.replace(profile, **changes)
    return profile


# -- commands ----------------------------------------------------------------------


def cmd_validate(args) -> int:
    source = _source(args)
    count = quads = empty = 0
    for m in source:
        count += 1
        quads += len(m)
        empty += not len(m)
    print(f"messages={count} quads={quads} empty={empty}")
    return OK


def cmd_convert(args) -> int:
    source = _source(args, args.input, args.source_format)
    fmt = detect_format(args.output, args.target_format)
    sink = _open_out(args.output)
    try:
        _write_stream(source, source, sink, fmt)
    finally:
        _close(sink)
    return OK


def cmd_split(args) -> int:
    out = Path(args.out_dir)
    if out.exists() and (not out.is_dir() or any(out.iterdir())):
        raise UsageError(f"output directory {out} exists and is not empty")
    out.mkdir(parents=True, exist_ok=True)
    source = _source(args)
    count = 0
    for seq, m in enumerate(source):
        (out / f"msg-{seq:06d}.trig").write_bytes(dumps_trig(m, source.prefixes))
        count += 1
    print(f"wrote {count} files to {out}", file=sys.stderr)
    return OK


def cmd_log_append(args) -> int:
    source = _source(args, args.input, args.format or "nqm")
    path = data_path_for(args.log)
    if path.exists():
        log = log_open(path, "a")
    else:
        profile = _profile(args) if args.chronology_predicate or args.profile else None
        log = log_create(path, profile)
    with log:
        first = log.next_seq
        for m in source:
            log.append(m)
        print(f"appended={log.next_seq - first} next_seq={log.next_seq}")
    return OK


def cmd_log_read(args) -> int:
    with log_open(args.log) as log:
        m = log.read(args.seq)
    sink = sys.stdout.buffer
    nqm_write([m], sink)
    sink.flush()
    return OK


def cmd_log_replay(args) -> int:
    if args.speed <= 0:
        raise UsageError("--speed must be positive")
    with log_open(args.log) as log:
        profile = _profile(args, log.profile or PROV) if args.pace == "chronology" else None
        stream = log.replay(args.from_seq, args.to_seq)
        sink = sys.stdout.buffer
        sink.write(VERSION_LINE)
        sink.flush()
        last = None
        for _, m in stream:
            if profile is not None:
                instant = extract_instant(m, profile)
                if instant is not None:
                    if last is not None:
                        delay = last.seconds_until(instant) / args.speed
                        if delay > 0:
                            _sleep(delay)
                    last = instant
            sink.write(format_message(m))
            sink.flush()
    return OK


def cmd_log_verify(args) -> int:
    with log_open(args.log, paranoid=False) as log:
        if not log.verify():
            _err(f"index {log.index_path} does not match its data file")
            return IO_ERROR
        print(f"ok messages={len(log)}")
    return OK


def _is_log(name: str) -> bool:
    return name != "-" and index_path_for(name).exists() and data_path_for(name).exists()


def cmd_check_order(args) -> int:
    profile = _profile(args)
    if args.order == "version" and profile.version_predicate is None:
        raise UsageError("--order version needs --version-predicate or a profile that defines one")
    if args.log or _is_log(args.file):
        with log_open(args.file) as log:
            report = check_order(log.replay(), profile, args.order)
    else:
        report = check_order(_source(args), profile, args.order)
    for v in report:
        print(v)
    if report:
        _err(f"{len(report)} {args.order} order violation(s)")
        return FAILED
    return OK


def cmd_skolemize(args) -> int:
    try:
        base = _iri_arg(args.base)
    except UsageError:
        raise UsageError(f"--base must be an absolute IRI, not {args.base!r}") from None
    source = _source(args)
    fmt = detect_format(args.output, args.target_format or source.fmt)

    def rewritten():
        for seq, m in enumerate(source):
            if args.id_template == "hash":
                message_id = hashlib.sha256(format_message(m)).hexdigest()[:16]
            else:
                message_id = f"{seq:06d}"
            yield skolemize(m, base, message_id)

    sink = _open_out(args.output)
    try:
        _write_stream(rewritten(), source, sink, fmt)
    finally:
        _close(sink)
    return OK


# -- argument parsing ------------------------------------------------------------


def _add_profile_args(p: argparse.ArgumentParser):
    p.add_argument("--profile", help="built-in profile (prov, sosa) or a profile file")
    p.add_argument("--chronology-predicate", metavar="IRI")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdfmsg", description="Work with RDF message streams and logs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def formatted(p, positional="file"):
        p.add_argument(positional, nargs="?", default="-", help="input file, '-' for stdin")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--strict-version", action="store_true", help="require the VERSION announcement")

    p = sub.add_parser("validate", help="check syntax and print a summary")
    formatted(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between trigm and nqm")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("output", nargs="?", default="-")
    p.add_argument("--from", dest="source_format", choices=FORMATS)
    p.add_argument("--to", dest="target_format", choices=FORMATS)
    p.add_argument("--strict-version", action="store_true")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("split", help="write each message as its own TriG file")
    formatted(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    log = sub.add_parser("log", help="append to, read, replay or verify a message log")
    log_sub = log.add_subparsers(dest="log_command", required=True, metavar="ACTION")

    p = log_sub.add_parser("append", help="append messages read from stdin (nqm by default)")
    p.add_argument("log")
    p.add_argument("--input", default="-")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--strict-version", action="store_true")
    _add_profile_args(p)
    p.set_defaults(func=cmd_log_append)

    p = log_sub.add_parser("read", help="print one message as nqm")
    p.add_argument("log")
    p.add_argument("--seq", type=int, required=True)
    p.set_defaults(func=cmd_log_read)

    p = log_sub.add_parser("replay", help="stream a range of messages as nqm")
    p.add_argument("log")
    p.add_argument("--from", dest="from_seq", type=int)
    p.add_argument("--to", dest="to_seq", type=int)
    p.add_argument("--pace", choices=("none", "chronology"), default="none")
    p.add_argument("--speed", type=float, default=1.0, help="pacing speed-up factor")
    _add_profile_args(p)
    p.set_defaults(func=cmd_log_replay)

    p = log_sub.add_parser("verify", help="rescan the data file and compare with the index")
    p.add_argument("log")
    p.set_defaults(func=cmd_log_verify)

    p = sub.add_parser("check-order", help="report messages that go back in time")
    formatted(p)
    p.add_argument("--log", action="store_true", help="treat the input as a message log")
    _add_profile_args(p)
    p.add_argument("--version-predicate", metavar="IRI")
    p.add_argument("--scope", choices=[s.value for s in GraphScope])
    p.add_argument("--order", choices=("chronology", "version"), default="chronology")
    p.set_defaults(func=cmd_check_order)

    p = sub.add_parser("skolemize", help="replace blank nodes with well-known IRIs")
    formatted(p)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--to", dest="target_format", choices=FORMATS)
    p.add_argument("--base", required=True, metavar="IRI")
    p.add_argument("--id-template", choices=("seq", "hash"), default="seq")
    p.set_defaults(func=cmd_skolemize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args)
    except UsageError as e:
        _err(str(e))
        return USAGE
    except MessageSyntaxError as e:
        _err(f"{getattr(args, 'file', None) or getattr(args, 'input', '-')}:{e}")
        return FAILED
    except ProfileError as e:
        where = f" at message {e.seq}" if e.seq is not None else ""
        _err(f"{e}{where}")
        return FAILED
    except OutOfRange as e:
        _err(str(e))
        return USAGE
    except InvalidBase as e:
        _err(str(e))
        return USAGE
    except (IndexCorrupt, NotFound, LogError, OSError) as e:
        if isinstance(e, BrokenPipeError):
            _silence_stdout()
            return OK
        _err(str(e))
        return IO_ERROR


def _silence_stdout():
    # Downstream closed the pipe; keep Python from complaining at shutdown.
    devnull = os.open(os.devnull, os.O_WRONLY)
    os.dup2(devnull, sys.stdout.fileno())


if __name__ == "__main__":
    sys.exit(main())
