"""Backend selection for the GF(2) elimination kernels.

The compiled extension is used when it imports; otherwise the pure-Python
implementation.  Set ``HDVFKIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from hdvfkit import _gf2py

try:
    from hdvfkit import _gf2core
except ImportError:
    _gf2core = None

_BACKENDS = {"python": _gf2py}
if _gf2core is not None:
    _BACKENDS["compiled"] = _gf2core


def available():
    """Names of the importable backends."""
    return sorted(_BACKENDS)


def get(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable GF(2) backend {name!r}") from None


if _gf2core is not None and os.environ.get("HDVFKIT_PURE_PYTHON", "") in ("", "0"):
    backend = _gf2core
else:
    backend = _gf2py

BACKEND = backend.NAME
rref = backend.rref
rank = backend.rank
reduce_columns = backend.reduce_columns
