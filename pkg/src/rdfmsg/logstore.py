"""Append-only message log: an N-Quads-Messages data file plus a text index.

Layout on disk::

    events.nqm        VERSION line, then one record per message
    events.nqm.idx    "#rdfmlog-index v1", then "seq offset length quads [timestamp]"

A record is committed once its index line is complete. Opening a log trims
anything past the last committed record, so a crash mid-append loses at most
the message being written.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Iterator, NamedTuple, Optional

from .errors import (
    AlreadyExists,
    ErrorKind,
    IndexCorrupt,
    LogError,
    MessageSyntaxError,
    NotFound,
    OutOfRange,
    ProfileError,
)
from .events import VERSION, MessageReady
from .message import Message
from .nqm import MESSAGE_LINE, VERSION_LINE, NQuadsMessageParser, format_message
from .profiles import Profile, extract_instant, parse_profile

try:
    import fcntl
except ImportError:  # pragma: no cover - non-POSIX
    fcntl = None

INDEX_MAGIC = "#rdfmlog-index v1"
_READ_SIZE = 1 << 16
_VERSION_RE = re.compile(rb'[ \t]*VERSION[ \t]+"([^"\\]*)"[ \t]*(?:#[^\n]*)?\r?\n')


class IndexRecord(NamedTuple):
    seq: int
    offset: int
    length: int
    quad_count: int
    timestamp: Optional[str] = None

    @property
    def end(self) -> int:
        return self.offset + self.length

    def line(self) -> str:
        fields = [self.seq, self.offset, self.length, self.quad_count]
        if self.timestamp is not None:
            fields.append(self.timestamp)
        return "\t".join(map(str, fields)) + "\n"


def data_path_for(path: str | os.PathLike) -> Path:
    """``events`` and ``events.nqm`` both name the data file ``events.nqm``."""
    p = Path(path)
    return p if p.suffix == ".nqm" else p.with_name(p.name + ".nqm")


def index_path_for(path: str | os.PathLike) -> Path:
    p = data_path_for(path)
    return p.with_name(p.name + ".idx")


def _fsync_dir(path: Path):
    try:
        fd = os.open(path.parent, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(fd)
    except OSError:
        pass
    finally:
        os.close(fd)


def _write_atomic(path: Path, data: bytes, fsync: bool):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
        f.flush()
        if fsync:
            os.fsync(f.fileno())
    os.replace(tmp, path)
    if fsync:
        _fsync_dir(path)


def _index_header(profile: Profile | None) -> str:
    if profile is None:
        return INDEX_MAGIC + "\n"
    return (
        f"{INDEX_MAGIC}\n#chronology=<{profile.chronology_predicate.value}>\n"
        f"#scope={profile.graph_scope.value}\n"
    )


def _header_end(head: bytes) -> int | None:
    """Byte offset just past the VERSION line, or None if it is torn."""
    pos = 3 if head.startswith(b"\xef\xbb\xbf") else 0
    while True:
        nl = head.find(b"\n", pos)
        if nl < 0:
            return None
        line = head[pos : nl + 1]
        stripped = line.strip()
        if stripped and not stripped.startswith(b"#"):
            break
        pos = nl + 1
    m = _VERSION_RE.fullmatch(line)
    if m is None:
        raise MessageSyntaxError(ErrorKind.VERSION_MISSING, "data file does not start with a VERSION line", 1, 1, pos)
    if m.group(1).decode("utf-8", "replace") != VERSION:
        raise MessageSyntaxError(
            ErrorKind.VERSION_UNSUPPORTED, f"unsupported version {m.group(1).decode('utf-8', 'replace')!r}", 1, 1, pos
        )
    return nl + 1


def _record_timestamp(m: Message, profile: Profile | None) -> str | None:
    if profile is None:
        return None
    try:
        instant = extract_instant(m, profile)
    except ProfileError:
        return None
    return None if instant is None else instant.lexical


def derive_records(data_path: str | os.PathLike, profile: Profile | None = None, limit: int | None = None):
    """Scan a data file and return ``(records, terminated)``.

    ``terminated`` is False when the file ends with a message that has no
    ``MESSAGE`` line (a hand-written file rather than one this module wrote).
    """
    parser = NQuadsMessageParser(require_version=True)
    records: list[IndexRecord] = []

    def take(events):
        for ev in events:
            if isinstance(ev, MessageReady):
                records.append(
                    IndexRecord(
                        len(records), ev.start, ev.end - ev.start, len(ev.message), _record_timestamp(ev.message, profile)
                    )
                )

    remaining = limit
    with open(data_path, "rb") as f:
        while remaining is None or remaining > 0:
            chunk = f.read(_READ_SIZE if remaining is None else min(_READ_SIZE, remaining))
            if not chunk:
                break
            if remaining is not None:
                remaining -= len(chunk)
            take(parser.feed(chunk))
        terminated_count = len(records)
        take(parser.finish())
    return records, len(records) == terminated_count


class MessageLog:
    """Handle on an on-disk message log. Use :func:`log_create` or :func:`log_open`."""

    def __init__(self, path, mode: str, *, fsync: bool = True, paranoid: bool = False):
        if mode not in ("r", "a"):
            raise ValueError(f"mode must be 'r' or 'a', not {mode!r}")
        self.data_path = data_path_for(path)
        self.index_path = index_path_for(path)
        self.mode = mode
        self.fsync = fsync
        self.profile: Profile | None = None
        self._records: list[IndexRecord] = []
        self._header_end = len(VERSION_LINE)
        self._data = None
        self._index = None
        if not self.data_path.exists():
            raise NotFound(f"no log data file at {self.data_path}")
        self._data = open(self.data_path, "r+b" if self.writable else "rb")
        try:
            if self.writable and fcntl is not None:
                try:
                    fcntl.flock(self._data.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
                except BlockingIOError:
                    raise LogError(f"{self.data_path} is already open for writing") from None
            self._load(paranoid)
        except BaseException:
            self.close()
            raise

    @property
    def writable(self) -> bool:
        return self.mode == "a"

    @property
    def next_seq(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[IndexRecord, ...]:
        return tuple(self._records)

    def __len__(self):
        return len(self._records)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        for f in (self._index, self._data):
            if f is not None:
                f.close()
        self._index = self._data = None

    @property
    def closed(self) -> bool:
        return self._data is None

    # -- loading and recovery ----------------------------------------------------

    def _load(self, paranoid: bool):
        size = os.fstat(self._data.fileno()).st_size
        self._data.seek(0)
        head = self._data.read(min(size, 4096))
        header_end = _header_end(head)
        if header_end is None:
            if len(head) < size or not VERSION_LINE.startswith(head):
                raise MessageSyntaxError(ErrorKind.VERSION_MISSING, "data file has no complete VERSION line", 1, 1, 0)
            self._records = []
            self.profile = self._read_index()[1] if self.index_path.exists() else None
            if self.writable:
                self._reinitialize()
            else:
                self._end = 0
            return
        self._header_end = header_end

        if not self.index_path.exists():
            self._build_missing_index(size)
            return

        records, profile, text, header_lines = self._read_index()
        self.profile = profile
        committed = self._check_records(records, size)
        self._records = records[:committed]
        end = self._records[-1].end if self._records else header_end
        if self._records:
            self._data.seek(end - len(MESSAGE_LINE))
            if self._data.read(len(MESSAGE_LINE)) != MESSAGE_LINE:
                raise IndexCorrupt(f"record {committed - 1} does not end with a MESSAGE line")
        if paranoid:
            derived, _ = derive_records(self.data_path, profile, limit=end)
            kept = "".join(line + "\n" for line in text.split("\n")[: header_lines + committed])
            if self._index_text(derived) != kept:
                raise IndexCorrupt("index does not match a rescan of the data file")
        if self.writable:
            if size > end:
                self._data.truncate(end)
                self._sync(self._data)
            if self._index_text(self._records) != text:
                _write_atomic(self.index_path, self._index_text(self._records).encode(), self.fsync)
            self._open_index()
        self._end = end

    def _read_index(self):
        try:
            text = self.index_path.read_bytes().decode("utf-8")
        except UnicodeDecodeError:
            raise IndexCorrupt(f"{self.index_path} is not UTF-8") from None
        lines = text.split("\n")
        torn = lines.pop()  # "" when the file ends with a newline
        if not lines:
            if INDEX_MAGIC.startswith(torn):
                return [], None, text, 0
            raise IndexCorrupt(f"{self.index_path} lacks the {INDEX_MAGIC!r} header")
        if lines[0] != INDEX_MAGIC:
            raise IndexCorrupt(f"{self.index_path} lacks the {INDEX_MAGIC!r} header")
        meta = []
        k = 1
        while k < len(lines) and lines[k].startswith("#"):
            meta.append(lines[k][1:])
            k += 1
        try:
            profile = parse_profile("\n".join(meta), "log") if meta else None
        except ValueError as e:
            raise IndexCorrupt(f"bad index metadata: {e}") from None
        records = []
        for lineno, line in enumerate(lines[k:], k + 1):
            fields = line.split("\t")
            try:
                if len(fields) not in (4, 5):
                    raise ValueError
                seq, offset, length, quads = (int(x) for x in fields[:4])
            except ValueError:
                raise IndexCorrupt(f"{self.index_path}:{lineno}: malformed record") from None
            records.append(IndexRecord(seq, offset, length, quads, fields[4] if len(fields) == 5 else None))
        return records, profile, text, k

    def _check_records(self, records: list[IndexRecord], size: int) -> int:
        """Validate the chain; return how many records lie fully inside the data file."""
        expected = self._header_end
        committed = 0
        for k, rec in enumerate(records):
            if rec.seq != k:
                raise IndexCorrupt(f"index record {k} has seq {rec.seq}")
            if rec.offset != expected:
                raise IndexCorrupt(f"index record {k} starts at {rec.offset}, expected {expected}")
            if rec.length <= 0 or rec.quad_count < 0:
                raise IndexCorrupt(f"index record {k} has a bad length or quad count")
            expected = rec.end
            if rec.end <= size:
                committed = k + 1
        return committed

    def _build_missing_index(self, size: int):
        records, terminated = derive_records(self.data_path, self.profile)
        if self.writable:
            if not terminated:
                self._data.seek(size)
                self._data.write(MESSAGE_LINE)
                last = records[-1]
                records[-1] = last._replace(length=last.length + len(MESSAGE_LINE))
                self._sync(self._data)
            _write_atomic(self.index_path, self._index_text(records).encode(), self.fsync)
            self._open_index()
        self._records = records
        self._end = records[-1].end if records else self._header_end

    def _reinitialize(self):
        self._data.seek(0)
        self._data.truncate(0)
        self._data.write(VERSION_LINE)
        self._sync(self._data)
        self._header_end = self._end = len(VERSION_LINE)
        _write_atomic(self.index_path, _index_header(self.profile).encode(), self.fsync)
        self._open_index()

    def _open_index(self):
        self._index = open(self.index_path, "ab")

    def _index_text(self, records) -> str:
        return _index_header(self.profile) + "".join(r.line() for r in records)

    def _sync(self, f):
        f.flush()
        if self.fsync:
            os.fsync(f.fileno())

    def refresh(self):
        """Re-read the index to pick up records appended by another handle."""
        if self.writable:
            return
        self._load(paranoid=False)

    # -- operations ----------------------------------------------------------------

    def append(self, m: Message) -> int:
        """Append ``m`` and return its sequence number once it is durable."""
        if not self.writable:
            raise LogError("log is open read-only")
        if self.closed:
            raise LogError("log is closed")
        record = format_message(m)
        rec = IndexRecord(len(self._records), self._end, len(record), len(m), _record_timestamp(m, self.profile))
        try:
            self._data.seek(self._end)
            self._data.write(record)
            self._sync(self._data)
            self._index.write(rec.line().encode())
            self._sync(self._index)
        except OSError:
            # Leave the handle unusable; the next open trims the torn tail.
            self.close()
            raise
        self._records.append(rec)
        self._end = rec.end
        return rec.seq

    def record(self, seq: int) -> IndexRecord:
        if not 0 <= seq < len(self._records):
            raise OutOfRange(f"seq {seq} is outside 0..{len(self._records) - 1}")
        return self._records[seq]

    def _read_record(self, rec: IndexRecord) -> Message:
        if self.closed:
            raise LogError("log is closed")
        self._data.seek(rec.offset)
        raw = self._data.read(rec.length)
        if len(raw) != rec.length:
            raise IndexCorrupt(f"record {rec.seq} runs past the end of the data file")
        parser = NQuadsMessageParser(require_version=False, start_offset=rec.offset)
        messages = [ev.message for ev in parser.feed(raw) + parser.finish() if isinstance(ev, MessageReady)]
        if len(messages) != 1:
            raise IndexCorrupt(f"record {rec.seq} holds {len(messages)} messages")
        return messages[0]

    def read(self, seq: int) -> Message:
        return self._read_record(self.record(seq))

    def replay(self, from_seq: int | None = None, to_seq: int | None = None) -> Iterator[tuple[int, Message]]:
        """Yield ``(seq, message)`` for ``from_seq..to_seq`` inclusive, one record at a time."""
        n = len(self._records)
        lo = 0 if from_seq is None else from_seq
        hi = n - 1 if to_seq is None else to_seq
        if from_seq is not None or to_seq is not None:
            for bound in (lo, hi):
                if not 0 <= bound < n:
                    raise OutOfRange(f"seq {bound} is outside 0..{n - 1}")
            if lo > hi:
                raise OutOfRange(f"from {lo} is after to {hi}")
        return self._replay(self._records[lo : hi + 1])

    def _replay(self, records):
        for rec in records:
            yield rec.seq, self._read_record(rec)

    def read_raw(self, seq: int) -> bytes:
        rec = self.record(seq)
        self._data.seek(rec.offset)
        return self._data.read(rec.length)

    def stored_index(self) -> str:
        return self._index_text(self._records)

    def rederive_index(self) -> str:
        records, _ = derive_records(self.data_path, self.profile, limit=self._end)
        return self._index_text(records)

    def verify(self) -> bool:
        """True when rescanning the data file reproduces the index file byte for byte."""
        try:
            on_disk = self.index_path.read_bytes().decode("utf-8")
        except (OSError, UnicodeDecodeError):
            return False
        return self.rederive_index() == on_disk


def log_create(path, profile: Profile | None = None, *, fsync: bool = True) -> MessageLog:
    """Create an empty log and return it open for appending."""
    data_path, index_path = data_path_for(path), index_path_for(path)
    if data_path.exists() or index_path.exists():
        raise AlreadyExists(f"log already exists at {data_path}")
    try:
        with open(data_path, "xb") as f:
            f.write(VERSION_LINE)
            f.flush()
            if fsync:
                os.fsync(f.fileno())
    except FileExistsError:
        raise AlreadyExists(f"log already exists at {data_path}") from None
    with open(index_path, "xb") as f:
        f.write(_index_header(profile).encode())
        f.flush()
        if fsync:
            os.fsync(f.fileno())
    if fsync:
        _fsync_dir(data_path)
    return MessageLog(path, "a", fsync=fsync)


def log_open(path, mode: str = "r", *, paranoid: bool = False, fsync: bool = True) -> MessageLog:
    """Open an existing log; ``mode`` is ``"r"`` (reader) or ``"a"`` (single writer)."""
    return MessageLog(path, mode, fsync=fsync, paranoid=paranoid)
