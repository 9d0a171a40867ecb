"""Ordered fan-out over a thread pool."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def ordered_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """
    Apply ``func`` to every item and return results in input order.

    ``jobs <= 1`` runs inline. Exceptions propagate from the first failing
    item in input order, so results never depend on scheduling.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(jobs, len(items))
    logger.debug(f"Dispatching {len(items)} tasks to {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, item) for item in items]
        return [future.result() for future in futures]
