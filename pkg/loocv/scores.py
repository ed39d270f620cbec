# loocv/scores.py
"""
Leave-one-out cross-validation scores for k-NN regression.

Two ways to get the same number:
- brute: n held-out predictions, each from the data with one row removed
- efficient: one (k+1)-NN fit on all the data, its training MSE scaled by ((k+1)/k)^2

They agree exactly when no two inputs coincide and no input is equidistant
from two others (see data.ties.detect_ties).
"""

import time
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Union

import numpy as np

from core.errors import DatasetTooSmall
from core.instrumentation import HELD_OUT_EVALUATIONS, get_counters
from core.logs import get_logger
from core.workers import get_row_pool
from neighbors.kd_tree import NeighborIndex
from regression.dataset import Dataset
from regression.knn import check_k, fit, mean_squared_error, predict, predict_loo_batch, training_mse

logger = get_logger("loocv")


class Method(str, Enum):
    BRUTE = "brute"
    EFFICIENT = "efficient"


class BruteVariant(str, Enum):
    SHARED = "shared"  # one index, held-out row excluded at query time
    REFIT = "refit"  # a fresh model per held-out row


@dataclass(frozen=True)
class LoocvResult:
    k: int
    score: float
    method: Method
    fit_count: int
    wall_time: float
    variant: Optional[BruteVariant] = None

    def as_record(self) -> Dict:
        """Plain fields for tabular output. Wall time is left out so records are reproducible."""
        return {
            "k": self.k,
            "method": self.method.value,
            "score": self.score,
            "fit_count": self.fit_count,
        }


def scaling_factor(k: int) -> float:
    """((k+1)/k)^2: 4.0 at k=1, 1.44 at k=5, tends to 1."""
    return ((k + 1) / k) ** 2


def _check_loo(dataset: Dataset, k: int):
    if dataset.n < 2:
        raise DatasetTooSmall(f"DatasetTooSmall: leave-one-out needs n >= 2, got n={dataset.n}")
    check_k(k, dataset.n - 1)


def _refit_predictions(dataset: Dataset, k: int, workers: Optional[int]) -> np.ndarray:
    def run(chunk: range) -> np.ndarray:
        out = np.empty((len(chunk), dataset.n_outputs))
        for i, ell in enumerate(chunk):
            model = fit(dataset.without_row(ell), k)
            out[i] = predict(model, dataset.inputs[ell])
        return out

    parts = get_row_pool(workers).map_rows(run, dataset.n, name="loo_refit")
    get_counters().count(HELD_OUT_EVALUATIONS, dataset.n)
    return np.concatenate(parts, axis=0)


def loocv_brute(
    dataset: Dataset,
    k: int,
    variant: Union[str, BruteVariant] = BruteVariant.SHARED,
    index: Optional[NeighborIndex] = None,
    workers: Optional[int] = None,
) -> LoocvResult:
    """
    (1/n) sum_l ||predict_loo(D, k, l) - y_l||^2.

    Args:
        variant: "shared" queries one index with row l excluded; "refit" builds
                 a new model on D without row l for every l
        index: prebuilt index over dataset.inputs (shared variant only)
    """
    variant = BruteVariant(variant)
    _check_loo(dataset, k)
    start = time.perf_counter()

    if variant is BruteVariant.REFIT:
        predictions = _refit_predictions(dataset, k, workers)
    else:
        predictions = predict_loo_batch(dataset, k, index=index, workers=workers)
    score = mean_squared_error(predictions, dataset.outputs)

    elapsed = time.perf_counter() - start
    logger.debug(f"brute/{variant.value} k={k}: score={score:.6g} ({elapsed:.3f}s)")
    return LoocvResult(
        k=k, score=score, method=Method.BRUTE, fit_count=dataset.n, wall_time=elapsed, variant=variant
    )


def loocv_efficient(
    dataset: Dataset,
    k: int,
    index: Optional[NeighborIndex] = None,
    workers: Optional[int] = None,
) -> LoocvResult:
    """((k+1)/k)^2 times the training MSE of (k+1)-NN fitted on the whole dataset."""
    _check_loo(dataset, k)
    start = time.perf_counter()

    model = fit(dataset, k + 1, index=index)
    score = scaling_factor(k) * training_mse(model, dataset, workers=workers)

    elapsed = time.perf_counter() - start
    logger.debug(f"efficient k={k}: score={score:.6g} ({elapsed:.3f}s)")
    return LoocvResult(k=k, score=score, method=Method.EFFICIENT, fit_count=1, wall_time=elapsed)
