"""Message profiles: which predicate orders a stream, and ordering utilities."""

from __future__ import annotations

import enum
import functools
import heapq
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import AmbiguousTimestamp, BadDatetime, ProfileError, UnorderedInput
from .message import Message
from .terms import XSD_DATETIME, DefaultGraph, Iri, Literal

PROV_GENERATED_AT_TIME = Iri("http://www.w3.org/ns/prov#generatedAtTime")
SOSA_RESULT_TIME = Iri("http://www.w3.org/ns/sosa/resultTime")

_DATETIME_RE = re.compile(
    r"(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})T([0-9]{2}):([0-9]{2}):([0-9]{2})(\.[0-9]+)?"
    r"(Z|[+-][0-9]{2}:[0-9]{2})?"
)


class GraphScope(enum.Enum):
    DEFAULT_ONLY = "default"
    ALL = "all"


@functools.total_ordering
class Instant:
    """An ``xsd:dateTime`` value: compares on the timeline, prints as written.

    Values without a timezone are read as UTC.
    """

    __slots__ = ("lexical", "key")

    def __init__(self, lexical: str):
        self.lexical = lexical
        self.key = _timeline_key(lexical)

    def __eq__(self, other):
        if not isinstance(other, Instant):
            return NotImplemented
        return self.key == other.key

    def __lt__(self, other):
        if not isinstance(other, Instant):
            return NotImplemented
        return self.key < other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return self.lexical

    def __repr__(self):
        return f"Instant({self.lexical!r})"

    def seconds_until(self, later: "Instant") -> float:
        return (later.key[0] - self.key[0]).total_seconds() + float(later.key[1] - self.key[1])


def _timeline_key(lexical: str) -> tuple[datetime, Decimal]:
    m = _DATETIME_RE.fullmatch(lexical)
    if m is None:
        raise BadDatetime(f"invalid xsd:dateTime {lexical!r}")
    year, month, day, hour, minute, second = (int(g) for g in m.groups()[:6])
    frac, tz = m.group(7) or "", m.group(8)
    digits = frac[1:]
    micro = int((digits[:6]).ljust(6, "0")) if digits else 0
    rest = Decimal("0." + digits[6:]) / Decimal(10**6) if len(digits) > 6 else Decimal(0)
    extra_day = False
    if hour == 24:
        if minute or second or any(d != "0" for d in digits):
            raise BadDatetime(f"invalid xsd:dateTime {lexical!r}: hour 24 must be 24:00:00")
        hour, extra_day = 0, True
    offset = timedelta(0)
    if tz and tz != "Z":
        sign = -1 if tz[0] == "-" else 1
        th, tm = int(tz[1:3]), int(tz[4:6])
        if th > 14 or tm > 59 or (th == 14 and tm):
            raise BadDatetime(f"invalid timezone in {lexical!r}")
        offset = sign * timedelta(hours=th, minutes=tm)
    try:
        value = datetime(year, month, day, hour, minute, second, micro, tzinfo=timezone(offset))
        if extra_day:
            value += timedelta(days=1)
        value = value.astimezone(timezone.utc)
    except (ValueError, OverflowError) as e:
        raise BadDatetime(f"invalid xsd:dateTime {lexical!r}: {e}") from None
    return value, rest


@dataclass(frozen=True)
class Profile:
    name: str
    chronology_predicate: Iri
    version_predicate: Optional[Iri] = None
    graph_scope: GraphScope = GraphScope.DEFAULT_ONLY

    def __post_init__(self):
        if not isinstance(self.chronology_predicate, Iri):
            object.__setattr__(self, "chronology_predicate", Iri(self.chronology_predicate))
        if self.version_predicate is not None and not isinstance(self.version_predicate, Iri):
            object.__setattr__(self, "version_predicate", Iri(self.version_predicate))
        if not isinstance(self.graph_scope, GraphScope):
            object.__setattr__(self, "graph_scope", GraphScope(self.graph_scope))


PROV = Profile("prov", PROV_GENERATED_AT_TIME, SOSA_RESULT_TIME)
SOSA = Profile("sosa", SOSA_RESULT_TIME)
BUILTIN_PROFILES = {"prov": PROV, "sosa": SOSA}


def parse_profile(text: str, name: str = "custom") -> Profile:
    """Read ``key=value`` profile lines (``chronology``, ``version``, ``scope``, ``name``)."""
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in ("chronology", "version", "scope", "name"):
            raise ValueError(f"profile line {lineno}: expected chronology=, version=, scope= or name=")
        if value.startswith("<") and value.endswith(">"):
            value = value[1:-1]
        fields[key] = value
    if "chronology" not in fields:
        raise ValueError("profile needs a chronology=<IRI> line")
    return Profile(
        fields.get("name", name),
        Iri(fields["chronology"]),
        Iri(fields["version"]) if "version" in fields else None,
        GraphScope(fields.get("scope", "default")),
    )


def load_profile(path: str | Path) -> Profile:
    path = Path(path)
    return parse_profile(path.read_text(encoding="utf-8"), path.stem)


def extract_instant(m: Message, profile: Profile, which: str = "chronology") -> Instant | None:
    """The message's chronology (or version) instant, or None when it has none."""
    if which == "chronology":
        predicate = profile.chronology_predicate
    elif which == "version":
        predicate = profile.version_predicate
        if predicate is None:
            return None
    else:
        raise ValueError(f"which must be 'chronology' or 'version', not {which!r}")
    default_only = profile.graph_scope is GraphScope.DEFAULT_ONLY
    found = None
    for q in m.quads:
        if q.predicate != predicate or (default_only and not isinstance(q.graph, DefaultGraph)):
            continue
        obj = q.object
        if not isinstance(obj, Literal) or obj.datatype != XSD_DATETIME:
            continue
        instant = Instant(obj.lexical)
        if found is None:
            found = instant
        elif instant != found:
            raise AmbiguousTimestamp(f"conflicting instants {found} and {instant} for <{predicate.value}>")
    return found


class Violation(NamedTuple):
    seq_i: int
    seq_j: int
    t_i: Instant
    t_j: Instant

    def __str__(self):
        return f"({self.seq_i}, {self.seq_j}, {self.t_i}, {self.t_j})"


def _numbered(messages) -> Iterator[tuple[int, Message]]:
    for k, item in enumerate(messages):
        if isinstance(item, Message):
            yield k, item
        else:
            yield item


def check_order(messages: Iterable, profile: Profile, which: str = "chronology") -> list[Violation]:
    """Adjacent timestamped pairs whose later message goes back in time.

    ``messages`` may hold bare messages (numbered from 0) or ``(seq, message)``
    pairs such as a log replay yields. Timestamp-less messages are skipped.
    """
    report = []
    prev: tuple[int, Instant] | None = None
    for seq, m in _numbered(messages):
        try:
            instant = extract_instant(m, profile, which)
        except ProfileError as e:
            e.seq = seq
            raise
        if instant is None:
            continue
        if prev is not None and instant < prev[1]:
            report.append(Violation(prev[0], seq, prev[1], instant))
        prev = (seq, instant)
    return report


def merge_by_chronology(streams: Iterable[Iterable[Message]], profile: Profile) -> Iterator[Message]:
    """Lazily k-way merge chronologically ordered streams.

    Ties go to the lower stream index. A message without an instant rides
    directly behind its predecessor in the same stream.
    """
    iters = [iter(s) for s in streams]
    heap: list = []
    last: list[Instant | None] = [None] * len(iters)
    seen = [0] * len(iters)

    def pull(i):
        for m in iters[i]:
            seq = seen[i]
            seen[i] += 1
            try:
                instant = extract_instant(m, profile)
            except ProfileError as e:
                e.seq = seq
                raise
            if instant is None:
                yield m
                continue
            if last[i] is not None and instant < last[i]:
                err = UnorderedInput(f"stream {i} goes back in time at message {seq}: {last[i]} then {instant}")
                err.seq = seq
                raise err
            last[i] = instant
            heapq.heappush(heap, (instant.key, i, m))
            return

    for i in range(len(iters)):
        yield from pull(i)
    while heap:
        _, i, m = heapq.heappop(heap)
        yield m
        yield from pull(i)
