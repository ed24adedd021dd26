"""Worker-pool helpers honoring the TBELL_THREADS cap.

TBELL_THREADS limits how many threads sweeps may use; 0 (or unset) means
auto-detect.  Work items are always collected in submission order, so results
are byte-identical no matter how many workers run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("TBELL_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"TBELL_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"TBELL_THREADS must be >= 0, got {n}")
    if n == 0:
        return os.cpu_count() or 1
    return n


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map over items, using at most thread_count() workers."""
    work: Sequence[T] = list(items)
    workers = min(thread_count(), len(work))
    if workers <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))
