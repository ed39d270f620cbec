# loocv/benchmark.py
"""
Timing harness: LOOCV cost against training-set size at fixed k.
Brute is timed in both variants (refit per held-out row, and one shared
index with query-time exclusion) next to the single-fit efficient method.
"""

import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from core.errors import ConfigError, KTooLarge
from core.logs import get_logger
from core.settings import get_settings
from data.synth import make_synthetic
from loocv.scores import BruteVariant, Method, loocv_brute, loocv_efficient
from regression.dataset import Dataset

logger = get_logger("bench")

T = TypeVar("T")


@dataclass(frozen=True)
class BenchRow:
    n: int
    method: Method
    variant: Optional[BruteVariant]
    seconds: float
    fit_count: int

    def as_record(self) -> Dict:
        return {
            "n": self.n,
            "method": self.method.value,
            "variant": self.variant.value if self.variant else "",
            "seconds": self.seconds,
            "fit_count": self.fit_count,
        }


def time_call(fn: Callable[[], T], reps: int) -> Tuple[float, T]:
    """Median wall time of reps calls (monotonic clock) and the last call's result."""
    if reps < 1:
        raise ConfigError(f"ConfigError: reps must be >= 1, got {reps}")
    times = []
    result = None
    for _ in range(reps):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times)), result


def run_benchmark(
    sizes: Optional[Sequence[int]] = None,
    k: Optional[int] = None,
    reps: Optional[int] = None,
    seed: int = 0,
    dim: int = 2,
    dataset: Optional[Dataset] = None,
    workers: Optional[int] = None,
    variants: Sequence[BruteVariant] = (BruteVariant.REFIT, BruteVariant.SHARED),
) -> List[BenchRow]:
    """
    Time every method at every n.

    Args:
        sizes: training-set sizes (defaults to LOOCV_BENCH_SIZES)
        dataset: when given, each n uses its first n rows instead of synthetic data
    """
    settings = get_settings()
    sizes = list(sizes or settings.bench_sizes)
    k = settings.bench_k if k is None else k
    reps = settings.reps if reps is None else reps

    if dataset is not None and max(sizes) > dataset.n:
        raise KTooLarge(max(sizes), dataset.n, "n")

    rows: List[BenchRow] = []
    for n in sizes:
        data = dataset.prefix(n) if dataset is not None else make_synthetic(n, dim=dim, seed=seed)
        if k > data.n - 1:
            raise KTooLarge(k, data.n - 1)

        jobs = [
            (Method.BRUTE, v, lambda v=v: loocv_brute(data, k, variant=v, workers=workers))
            for v in map(BruteVariant, variants)
        ]
        jobs.append((Method.EFFICIENT, None, lambda: loocv_efficient(data, k, workers=workers)))

        for method, variant, job in jobs:
            seconds, result = time_call(job, reps)
            row = BenchRow(n=n, method=method, variant=variant, seconds=seconds, fit_count=result.fit_count)
            rows.append(row)
            label = method.value + (f"/{variant.value}" if variant else "")
            logger.info(f"n={n} {label}: median {seconds:.4f}s over {reps} reps")

    return rows
