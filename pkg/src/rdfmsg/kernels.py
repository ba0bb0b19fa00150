"""Backend selection for the string kernels.

The compiled ``_speedups`` extension is used when it was built; otherwise the
pure-Python ``_purepy`` module. Set ``RDFMSG_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _purepy

IRI, BNODE, LITERAL = _purepy.IRI, _purepy.BNODE, _purepy.LITERAL

_impl = _purepy
if os.environ.get("RDFMSG_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _speedups as _impl
    except ImportError:
        pass

BACKEND = "cython" if _impl is not _purepy else "python"

escape_string = _impl.escape_string
unescape_string = _impl.unescape_string
unescape_iri = _impl.unescape_iri
parse_nquad_line = _impl.parse_nquad_line
