# core/workers.py
"""
Row-chunked worker pool for batch evaluation.
Chunks are submitted to a thread pool and collected back in chunk order, so
any reduction done afterwards sees the same operands in the same order no
matter how many threads ran.
"""

import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

from core.logs import get_logger
from core.settings import get_settings

logger = get_logger("workers")

T = TypeVar("T")


class RowPool:
    """Thread pool that maps a chunk function over row ranges."""

    def __init__(self, workers: Optional[int] = None, chunk_size: Optional[int] = None):
        settings = get_settings()
        self.workers = max(1, workers or settings.workers)
        self.chunk_size = max(1, chunk_size or settings.chunk_size)

    def chunks(self, n: int) -> List[range]:
        return [range(start, min(start + self.chunk_size, n)) for start in range(0, n, self.chunk_size)]

    def map_rows(self, func: Callable[[range], T], n: int, name: str = "task") -> List[T]:
        """Run func on each chunk of range(n); results come back in chunk order."""
        chunks = self.chunks(n)
        start_time = time.perf_counter()

        try:
            if self.workers == 1 or len(chunks) <= 1:
                results = [func(chunk) for chunk in chunks]
            else:
                with ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix=f"rows_{name}") as pool:
                    results = list(pool.map(func, chunks))
        except Exception as e:
            elapsed = time.perf_counter() - start_time
            logger.error(f"Task '{name}' failed after {elapsed:.2f}s: {e}")
            logger.debug(traceback.format_exc())
            raise

        elapsed = time.perf_counter() - start_time
        logger.debug(
            f"Task '{name}' completed in {elapsed:.3f}s "
            f"({n} rows, {len(chunks)} chunks, {self.workers} workers)"
        )
        return results


def get_row_pool(workers: Optional[int] = None) -> RowPool:
    """Pool sized from settings unless workers is given."""
    return RowPool(workers=workers)
