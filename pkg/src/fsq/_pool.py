"""Order-preserving parallel map. FSQ_THREADS caps the worker count; 1 runs inline."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("FSQ_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"FSQ_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(os.cpu_count() or 1, 8))


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None, chunksize: int = 1) -> list[R]:
    """map(fn, items) with results in input order, so reductions are deterministic.

    fn and items must be picklable when more than one worker is used.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
