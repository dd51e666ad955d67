"""
Bounded worker pool with ordered results
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

Item = TypeVar("Item")
Result = TypeVar("Result")


def parallel_map(fn: Callable[[Item], Result], items: Iterable[Item], workers: int = 1) -> List[Result]:
    """
    map() over items, results in input order

    fn must be picklable (a module-level function or functools.partial of one)
    when workers > 1. One worker runs inline in this process.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.info("fanning %d tasks out to %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=1))
