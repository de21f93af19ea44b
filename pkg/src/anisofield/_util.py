"""Small shared helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

from .errors import ConfigError

_T = TypeVar("_T")
_R = TypeVar("_R")

_THREADS_ENV = "ANISO_THREADS"


def thread_count() -> int:
    """Worker cap from ANISO_THREADS (default 1)."""
    raw = os.environ.get(_THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{_THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{_THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def map_ordered(fn: Callable[[_T], _R], items: Iterable[_T]) -> list[_R]:
    """Map preserving input order; uses threads when ANISO_THREADS > 1.

    Results are reduced in input order, so output is independent of worker
    scheduling.
    """
    seq: Sequence[_T] = list(items)
    workers = thread_count()
    if workers == 1 or len(seq) < 2:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
