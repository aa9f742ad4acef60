"""Worker pool for grid sweeps."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from src import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(func: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Apply func to every item; results come back in input order whatever the completion order."""
    items = list(items)
    workers = workers or settings.MAX_PARALLEL_JOBS
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    results: list = [None] * len(items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {index: pool.submit(func, item) for index, item in enumerate(items)}
        for index, future in futures.items():
            try:
                results[index] = future.result()
            except Exception as e:
                logger.error(f"Worker error for item {index}: {e}", exc_info=True)
                raise
    logger.debug(f"Pool of {workers} finished {len(items)} items")
    return results
