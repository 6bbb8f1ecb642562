"""Kernel backend selection.

The compiled Cython core is used when it imported cleanly; otherwise the
numpy fallback takes over.  Set ORLICZ_NA_FORCE_FALLBACK=1 to force the
fallback even when the extension is built (used by the benchmark and the
backend-equivalence tests).
"""

import os

from . import _fallback

impl = _fallback
if not os.environ.get("ORLICZ_NA_FORCE_FALLBACK"):
    try:
        from . import _core as _compiled

        impl = _compiled
    except ImportError:
        pass

BACKEND = impl.BACKEND


def backend_name() -> str:
    return BACKEND


def get_impl(name: str):
    """Fetch a specific backend by name ('compiled' or 'fallback')."""
    if name == "fallback":
        return _fallback
    if name == "compiled":
        from . import _core as _compiled

        return _compiled
    raise ValueError(f"unknown backend {name!r}")
