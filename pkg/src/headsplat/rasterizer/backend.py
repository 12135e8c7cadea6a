"""Kernel backend selection: compiled extension with a pure-numpy fallback.

Set HEADSPLAT_BACKEND=python to force the fallback; HEADSPLAT_BACKEND=ext
raises if the extension is missing.
"""

from __future__ import annotations

import os

from . import _fallback

_forced = os.environ.get("HEADSPLAT_BACKEND", "").lower()

if _forced == "python":
    _impl = _fallback
    ACTIVE_BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        ACTIVE_BACKEND = "ext"
    except ImportError:
        if _forced == "ext":
            raise
        _impl = _fallback
        ACTIVE_BACKEND = "python"


def get_blend_tiles(backend: str | None = None):
    if backend is None:
        return _impl.blend_tiles
    if backend == "python":
        return _fallback.blend_tiles
    if backend == "ext":
        from . import _kernels
        return _kernels.blend_tiles
    raise ValueError(f"unknown backend {backend!r}")
