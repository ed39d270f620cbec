# loocv/sweep.py
"""
LOOCV over a contiguous range of k, best-k selection, and the per-k
brute/efficient discrepancy when both methods run.
"""

import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from core.errors import ConfigError, DatasetTooSmall, EmptySweep, InvalidKRange, KTooLarge
from core.logs import get_logger
from core.settings import get_settings
from loocv.scores import BruteVariant, LoocvResult, Method, loocv_brute, loocv_efficient
from neighbors.kd_tree import build_index
from regression.dataset import Dataset

logger = get_logger("loocv")

# Looked up at call time, so a scorer can be swapped out (tests inject a broken one)
SCORERS: Dict[Method, Callable[..., LoocvResult]] = {
    Method.BRUTE: loocv_brute,
    Method.EFFICIENT: loocv_efficient,
}

RELATIVE_EPS = 1e-300


@dataclass(frozen=True)
class Discrepancy:
    k: int
    brute: float
    efficient: float
    absolute: float
    relative: float
    sign: int  # +1 efficient overestimates, -1 underestimates, 0 equal


@dataclass(frozen=True)
class SweepResult:
    k_values: Tuple[int, ...]
    results: Dict[Method, Tuple[LoocvResult, ...]]
    best_k: Dict[Method, int]
    discrepancies: Tuple[Discrepancy, ...] = ()
    variant: BruteVariant = BruteVariant.SHARED
    wall_time: float = 0.0

    def scores(self, method: Union[str, Method]) -> Dict[int, float]:
        return {r.k: r.score for r in self.results[Method(method)]}

    def max_relative_discrepancy(self) -> float:
        return max((d.relative for d in self.discrepancies), default=0.0)

    def records(self) -> List[Dict]:
        """One record per (k, method); discrepancy columns are added when both methods ran."""
        by_k = {d.k: d for d in self.discrepancies}
        rows = []
        for k_pos, k in enumerate(self.k_values):
            for method in self.results:
                record = self.results[method][k_pos].as_record()
                if k in by_k:
                    d = by_k[k]
                    record.update(
                        absolute_discrepancy=d.absolute,
                        relative_discrepancy=d.relative,
                        discrepancy_sign=d.sign,
                    )
                rows.append(record)
        return rows


def default_k_range(n: int) -> Tuple[int, int]:
    return 1, max(1, min(get_settings().k_max_default, n - 1))


def relative_discrepancy(brute: float, efficient: float) -> float:
    return abs(brute - efficient) / max(brute, RELATIVE_EPS)


def compare(brute: LoocvResult, efficient: LoocvResult) -> Discrepancy:
    diff = efficient.score - brute.score
    return Discrepancy(
        k=brute.k,
        brute=brute.score,
        efficient=efficient.score,
        absolute=abs(diff),
        relative=relative_discrepancy(brute.score, efficient.score),
        sign=(diff > 0) - (diff < 0),
    )


def argmin_k(scores: Mapping[int, float]) -> int:
    """Smallest k attaining the minimum score."""
    if not scores:
        raise EmptySweep("EmptySweep: no scores to select k from")
    return min(scores, key=lambda k: (scores[k], k))


def _methods(method: Union[str, Method]) -> Tuple[Method, ...]:
    if str(getattr(method, "value", method)) == "both":
        return (Method.BRUTE, Method.EFFICIENT)
    try:
        return (Method(method),)
    except ValueError:
        raise ConfigError(f"ConfigError: unknown method '{method}' (brute, efficient or both)")


def loocv_sweep(
    dataset: Dataset,
    k_min: Optional[int] = None,
    k_max: Optional[int] = None,
    method: Union[str, Method] = "both",
    variant: Union[str, BruteVariant] = BruteVariant.SHARED,
    workers: Optional[int] = None,
) -> SweepResult:
    """
    Score every k in [k_min, k_max] with the requested method(s).
    The neighbour index is built once and shared by every k.
    """
    if dataset.n < 2:
        raise DatasetTooSmall(f"DatasetTooSmall: leave-one-out needs n >= 2, got n={dataset.n}")
    default_min, default_max = default_k_range(dataset.n)
    k_min = default_min if k_min is None else k_min
    k_max = default_max if k_max is None else k_max
    if k_min < 1:
        raise InvalidKRange(f"InvalidKRange: k_min must be >= 1, got {k_min}")
    if k_max > dataset.n - 1:
        raise KTooLarge(k_max, dataset.n - 1, "k_max")
    if k_min > k_max:
        raise InvalidKRange(f"InvalidKRange: k_min={k_min} is greater than k_max={k_max}")

    methods = _methods(method)
    variant = BruteVariant(variant)
    start = time.perf_counter()
    index = build_index(dataset.inputs)
    k_values = tuple(range(k_min, k_max + 1))

    results: Dict[Method, Tuple[LoocvResult, ...]] = {}
    for m in methods:
        extra = {"variant": variant} if m is Method.BRUTE else {}
        if m is Method.BRUTE and variant is BruteVariant.REFIT:
            scorer_index = None
        else:
            scorer_index = index
        results[m] = tuple(
            SCORERS[m](dataset, k, index=scorer_index, workers=workers, **extra) for k in k_values
        )

    best_k = {m: argmin_k({r.k: r.score for r in rs}) for m, rs in results.items()}
    discrepancies: Tuple[Discrepancy, ...] = ()
    if len(methods) == 2:
        discrepancies = tuple(
            compare(b, e) for b, e in zip(results[Method.BRUTE], results[Method.EFFICIENT])
        )

    sweep = SweepResult(
        k_values=k_values,
        results=results,
        best_k=best_k,
        discrepancies=discrepancies,
        variant=variant,
        wall_time=time.perf_counter() - start,
    )
    best = ", ".join(f"{m.value}={k}" for m, k in best_k.items())
    logger.info(f"Sweep k={k_min}..{k_max} on n={dataset.n}: best_k {best} ({sweep.wall_time:.2f}s)")
    if discrepancies:
        logger.info(f"Max relative discrepancy {sweep.max_relative_discrepancy():.3e}")
    return sweep


def select_best_k(sweep: Union[SweepResult, Mapping[int, float]], method: Union[None, str, Method] = None) -> int:
    """
    Smallest k with the minimum score. A SweepResult uses its efficient
    scores when present, else brute; a plain {k: score} mapping is used as is.
    """
    if not isinstance(sweep, SweepResult):
        return argmin_k(sweep)
    if not sweep.results:
        raise EmptySweep("EmptySweep: sweep holds no results")
    if method is None:
        method = Method.EFFICIENT if Method.EFFICIENT in sweep.results else Method.BRUTE
    return argmin_k(sweep.scores(method))
