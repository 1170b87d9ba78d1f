"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the
pure-Python twin is the fallback.  Setting the environment variable
``FINGERTYPE_PURE_PY=1`` before import forces the pure-Python backend,
which is useful for debugging and for benchmarking one backend against
the other.
"""

from __future__ import annotations

import os

if os.environ.get("FINGERTYPE_PURE_PY", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pykernels as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
edit_ops = _impl.edit_ops
prepare_trie = _impl.prepare_trie
trie_search = _impl.trie_search

__all__ = ["BACKEND", "edit_ops", "prepare_trie", "trie_search"]
