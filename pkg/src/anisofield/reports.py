"""Machine-readable verification reports.

Reports follow the versioned `report/1` JSON schema: a tool stanza, the full
configuration echo, one record per check (each numeric statistic is stored
next to the threshold it was compared against), the conjunction pass flag,
and the wall clock. Everything except `wall_clock_s` is a deterministic
function of (config, seed, version); canonical serialization keeps the bytes
stable. Files are written atomically (write to a temp name, then rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ._version import __version__

__all__ = [
    "CheckRecord",
    "VerificationReport",
    "canonical_json",
    "csv_float",
    "atomic_write_text",
]

SCHEMA = "report/1"


def _plain(value: Any) -> Any:
    """Coerce numpy scalars/arrays to JSON-friendly builtins, recursively."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class CheckRecord:
    """One named check: statistic vs. threshold plus the inputs that produced it."""

    name: str
    passed: bool
    statistic: Optional[float] = None
    threshold: Optional[float] = None
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "statistic": _plain(self.statistic),
            "threshold": _plain(self.threshold),
            "inputs": _plain(self.inputs),
        }


@dataclass
class VerificationReport:
    config: dict
    checks: list[CheckRecord]
    wall_clock_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "tool": {"name": "anisofield", "version": __version__},
            "config": _plain(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "wall_clock_s": float(self.wall_clock_s),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def csv_float(value) -> str:
    """CSV number format: '.' decimal, 17 significant digits (round-trip exact)."""
    return format(float(value), ".17g")


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
