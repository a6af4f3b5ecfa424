"""Kernel selection: compiled extension when available, numpy fallback
otherwise.

Set QUBOFS_PURE_PYTHON=1 to force the fallback (used by the equivalence
tests and the kernel benchmark). Both implementations follow the same
floating-point operation order, so results are identical either way.
"""

from __future__ import annotations

import os

if os.environ.get("QUBOFS_PURE_PYTHON"):
    from . import _fallback as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _fallback as _impl  # type: ignore[no-redef]

sa_chain = _impl.sa_chain
exhaustive_scan = _impl.exhaustive_scan


def active_impl() -> str:
    """Which kernel implementation this process is running ("native" or
    "fallback")."""
    return _impl.IMPL
