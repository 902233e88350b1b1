"""
Worker pool for independent spectrum slices.
Runs a blocking function over many inputs on a bounded set of threads.
"""

import asyncio
import logging
from typing import Callable, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Global worker state
_worker_running = False
_completed = 0


async def run_job(index: int, func: Callable[[T], R], item: T, semaphore: asyncio.Semaphore) -> R:
    """
    Run one job in a worker thread once a slot is free.

    Args:
        index: Position of the item in the input
        func: Blocking function to run
        item: Its argument
        semaphore: Slot limiter shared by the batch

    Returns:
        func(item)
    """
    global _completed

    async with semaphore:
        logger.debug(f"Starting job {index}")
        try:
            result = await asyncio.to_thread(func, item)
        except Exception as e:
            logger.error(f"Job {index} failed: {e}")
            raise
        _completed += 1
        logger.debug(f"Finished job {index}")
        return result


async def run_parallel(func: Callable[[T], R], items: Sequence[T], max_workers: int = 4) -> List[R]:
    """
    Map ``func`` over ``items`` with at most ``max_workers`` running at once.

    Completion order is arbitrary; results come back in input order.

    Args:
        func: Blocking function of one argument
        items: Inputs
        max_workers: Concurrency limit

    Returns:
        List of results aligned with ``items``

    Raises:
        ValueError: If max_workers < 1
    """
    global _worker_running, _completed

    if max_workers < 1:
        raise ValueError(f"max_workers must be positive, got {max_workers}")
    if _worker_running:
        logger.warning("Worker pool already busy, starting another batch")

    logger.info(f"Running {len(items)} jobs on {max_workers} workers")
    _worker_running = True
    _completed = 0
    semaphore = asyncio.Semaphore(max_workers)
    try:
        results = await asyncio.gather(
            *(run_job(i, func, item, semaphore) for i, item in enumerate(items))
        )
    finally:
        _worker_running = False
    logger.info(f"Worker pool finished {_completed} jobs")
    return list(results)


def map_slices(func: Callable[[T], R], items: Sequence[T], max_workers: int = 4,
               loop: Optional[asyncio.AbstractEventLoop] = None) -> List[R]:
    """Synchronous entry point for ``run_parallel``; ``loop`` reuses an existing event loop."""
    if loop is not None:
        return loop.run_until_complete(run_parallel(func, items, max_workers))
    return asyncio.run(run_parallel(func, items, max_workers))
