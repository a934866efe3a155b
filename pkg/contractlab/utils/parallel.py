import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

from ..config.settings import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ranges(
    func: Callable[[int, int], T],
    total: int,
    threads: Optional[int] = None,
    min_chunk: Optional[int] = None,
) -> List[T]:
    """
    Apply func(start, stop) over disjoint ranges that cover [0, total).

    Results come back in range order, so a reduction over them is deterministic
    regardless of the worker count.

    Args:
        func: callable taking a half-open range
        total: length of the index space
        threads: worker bound (defaults to settings.threads)
        min_chunk: ranges are never shorter than this (defaults to settings.parallel_min_chunk)

    Returns:
        List of per-range results
    """
    threads = settings.threads if threads is None else threads
    min_chunk = settings.parallel_min_chunk if min_chunk is None else min_chunk
    chunks = max(1, min(threads, -(-total // max(1, min_chunk))))
    if chunks == 1:
        return [func(0, total)]

    edges = np.linspace(0, total, chunks + 1).astype(np.int64)
    bounds = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    logger.debug(f"Scanning {total} indices in {len(bounds)} chunks")
    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        futures = [pool.submit(func, start, stop) for start, stop in bounds]
        return [future.result() for future in futures]


def map_items(
    func: Callable[[T], R],
    items: Iterable[T],
    threads: Optional[int] = None,
) -> List[R]:
    """Order-preserving parallel map over independent work items."""
    items = list(items)
    threads = settings.threads if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))
