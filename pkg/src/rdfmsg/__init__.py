"""RDF Messages: message-scoped datasets, their serializations, logs and profiles."""

__version__ = "0.1.0"

from .errors import (
    AlreadyExists,
    AmbiguousTimestamp,
    BadDatetime,
    ErrorKind,
    IndexCorrupt,
    InvalidBase,
    LogError,
    MessageSyntaxError,
    MixedScope,
    NotFound,
    OutOfRange,
    ProfileError,
    RdfMessageError,
    UnorderedInput,
)
from .events import END_OF_LOG, NEED_MORE_INPUT, EndOfLog, MessageReady, NeedMoreInput
from .kernels import BACKEND
from .logstore import IndexRecord, MessageLog, log_create, log_open
from .message import Message, find_bijection, message_isomorphic, new_message, skolemize, union
from .nqm import NQuadsMessageParser, nqm_dumps, nqm_parse, nqm_write, parse_nqm
from .profiles import (
    PROV,
    SOSA,
    GraphScope,
    Instant,
    Profile,
    Violation,
    check_order,
    extract_instant,
    load_profile,
    merge_by_chronology,
)
from .terms import DEFAULT_GRAPH, BlankNode, DefaultGraph, Iri, Literal, Quad
from .trigm import TrigMessageParser, dumps_trig, dumps_trigm, parse_trigm, parser_new, trigm_parse, write_log

__all__ = [name for name in dir() if not name.startswith("_")]
