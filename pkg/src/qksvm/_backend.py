"""Backend selection: compiled extension when available, numpy fallback otherwise.

Set QKSVM_BACKEND=pure or QKSVM_BACKEND=compiled to force a choice
(``compiled`` raises if the extension was not built). Default is ``auto``.
"""

import os

from . import _pure


def _select():
    choice = os.environ.get("QKSVM_BACKEND", "auto").lower()
    if choice not in ("auto", "compiled", "pure"):
        raise ImportError(f"QKSVM_BACKEND must be auto, compiled or pure, got {choice!r}")
    if choice in ("auto", "compiled"):
        try:
            from . import _core

            return _core, "compiled"
        except ImportError:
            if choice == "compiled":
                raise
    return _pure, "pure"


backend, backend_name = _select()


def active_backend() -> str:
    """Name of the gate-kernel backend in use: 'compiled' or 'pure'."""
    return backend_name
