"""
Worker fan-out.

Runs independent blocking computations on worker threads with asyncio,
returning results in input order.
"""

import asyncio
import logging
from collections.abc import Callable, Sequence
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


async def gather_in_threads(calls: Sequence[Callable[[], T]], workers: int = 1) -> list[T]:
    """
    Run `calls` in threads, at most `workers` at a time.

    The first exception raised by any call is re-raised after all calls
    have finished; results keep the order of `calls`.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    semaphore = asyncio.Semaphore(workers)

    async def run_one(call: Callable[[], T]) -> T:
        async with semaphore:
            return await asyncio.to_thread(call)

    tasks = [asyncio.create_task(run_one(call)) for call in calls]
    results = await asyncio.gather(*tasks, return_exceptions=True)

    for result in results:
        if isinstance(result, BaseException):
            raise result
    logger.debug("gathered %d calls on %d workers", len(calls), workers)
    return list(results)  # type: ignore[arg-type]


def run_in_threads(calls: Sequence[Callable[[], T]], workers: int = 1) -> list[T]:
    """Synchronous wrapper around gather_in_threads; runs inline for one worker."""
    if workers == 1:
        return [call() for call in calls]
    return asyncio.run(gather_in_threads(calls, workers))
