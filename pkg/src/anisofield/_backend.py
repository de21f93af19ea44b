"""Compute backend selection.

The compiled extension is preferred when importable; `ANISOFIELD_BACKEND`
forces the choice (`compiled`, `numpy`, or `auto`). Both backends expose the
same module-level API; see `_core_np` for the reference semantics.
"""

from __future__ import annotations

import os
from types import ModuleType

from .errors import BackendError

_ENV_VAR = "ANISOFIELD_BACKEND"


def _load() -> tuple[ModuleType, str]:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in {"auto", "compiled", "numpy"}:
        raise BackendError(
            f"{_ENV_VAR} must be 'auto', 'compiled', or 'numpy', got {choice!r}"
        )
    if choice in {"auto", "compiled"}:
        try:
            from . import _core_cy  # type: ignore[attr-defined]

            return _core_cy, "compiled"
        except ImportError:
            if choice == "compiled":
                raise BackendError(
                    "compiled backend requested but the extension is not built"
                ) from None
    from . import _core_np

    return _core_np, "numpy"


core, _BACKEND_NAME = _load()


def backend_name() -> str:
    """Name of the active backend: 'compiled' or 'numpy'."""
    return _BACKEND_NAME
