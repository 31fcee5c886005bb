"""Order-preserving execution of independent work units."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger("fss_toolkit.parallel")

T = TypeVar("T")
R = TypeVar("R")


def run_indexed(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: int = 1,
) -> list[R]:
    """Apply ``func`` to every item and return results in input order.

    Each work unit draws from its own ``RandomStream``, so merging by index
    gives identical results for any worker count.
    """
    work: Sequence[T] = list(items)
    if workers <= 1 or len(work) <= 1:
        return [func(item) for item in work]
    logger.debug(f"Dispatching {len(work)} work units to {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))
