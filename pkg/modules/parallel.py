"""Order-preserving parallel map over a process pool."""
import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Any, Callable, Iterable, List

from .logger import get_logger

logger = get_logger('parallel')


def _make_executor(workers: int) -> Executor:
    """Create a process pool, preferring 'fork' so workers inherit module state.

    Falls back to a thread pool when processes cannot be started.
    """
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=workers, mp_context=ctx)
    except (ValueError, OSError) as e:
        logger.warning(f"Process pool unavailable ({e}); falling back to threads")
        return ThreadPoolExecutor(max_workers=workers)


def parallel_map(func: Callable[[Any], Any], items: Iterable[Any], workers: int = 1) -> List[Any]:
    """Apply func to every item, returning results in input order.

    Args:
        func: Module-level callable (it must pickle).
        items: Work items.
        workers: Pool width; 1 or fewer runs in-process.

    Returns:
        List of results aligned with items.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(workers, len(items))
    logger.debug(f"Dispatching {len(items)} work items to {workers} workers")
    with _make_executor(workers) as executor:
        return list(executor.map(func, items))
