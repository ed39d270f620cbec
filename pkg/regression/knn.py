# regression/knn.py
"""
k-NN regression: prediction, held-out prediction and training-set MSE.
Outputs may be vector valued (M >= 1); squared errors use the Euclidean norm
over the M components.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.errors import DatasetTooSmall, DimensionMismatch, InvalidKRange, KTooLarge, RowOutOfRange
from core.instrumentation import HELD_OUT_EVALUATIONS, MODEL_FITS, get_counters
from core.logs import get_logger
from core.workers import get_row_pool
from neighbors.kd_tree import NeighborIndex, build_index
from regression.dataset import Dataset

logger = get_logger("regression")


@dataclass(frozen=True, eq=False)
class KnnModel:
    """k-NN regressor fitted on one dataset. Immutable."""

    index: NeighborIndex
    outputs: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return self.index.n


def check_k(k: int, limit: int, what: str = "k"):
    if k < 1:
        raise InvalidKRange(f"InvalidKRange: {what} must be >= 1, got {k}")
    if k > limit:
        raise KTooLarge(k, limit, what)


def check_index(index: NeighborIndex, dataset: Dataset):
    """The index must cover dataset.inputs row for row, reporting positions 0..n-1."""
    if index.n != dataset.n or index.dim != dataset.dim:
        raise DimensionMismatch("DimensionMismatch: index was not built over this dataset")
    if not np.array_equal(index.row_ids, np.arange(dataset.n)):
        raise DimensionMismatch("DimensionMismatch: index row ids must be the positions 0..n-1")
    if not np.array_equal(index.points, dataset.inputs):
        raise DimensionMismatch("DimensionMismatch: index was not built over this dataset")


def fit(dataset: Dataset, k: int, index: Optional[NeighborIndex] = None) -> KnnModel:
    """Fit k-NN regression. An index already built over dataset.inputs may be reused."""
    check_k(k, dataset.n)
    if index is None:
        index = build_index(dataset.inputs)
    else:
        check_index(index, dataset)
    get_counters().count(MODEL_FITS)
    return KnnModel(index=index, outputs=dataset.outputs, k=k)


def neighbor_means(outputs: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Mean of outputs over each row of neighbour indices: (m, k) -> (m, M)."""
    return outputs[indices].mean(axis=1)


def predict_batch(model: KnnModel, queries, workers: Optional[int] = None) -> np.ndarray:
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim == 1 and model.index.dim == 1:
        queries = queries.reshape(-1, 1)
    if queries.ndim != 2 or queries.shape[1] != model.index.dim:
        raise DimensionMismatch(
            f"DimensionMismatch: queries must be (m, {model.index.dim}), got shape {queries.shape}"
        )

    def run(chunk: range) -> np.ndarray:
        indices, _ = model.index.query_batch(queries[chunk.start:chunk.stop], model.k)
        return neighbor_means(model.outputs, indices)

    parts = get_row_pool(workers).map_rows(run, len(queries), name="predict")
    if not parts:
        return np.empty((0, model.outputs.shape[1]))
    return np.concatenate(parts, axis=0)


def predict(model: KnnModel, query) -> np.ndarray:
    """Mean of the k nearest training outputs. Returns a length-M vector."""
    q = np.asarray(query, dtype=np.float64).reshape(1, -1)
    return predict_batch(model, q, workers=1)[0]


def training_predictions(model: KnnModel, dataset: Dataset, workers: Optional[int] = None) -> np.ndarray:
    return predict_batch(model, dataset.inputs, workers=workers)


def squared_errors(predictions: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """Per-row squared Euclidean norm of the residual, shape (n,)."""
    residual = np.asarray(predictions, dtype=np.float64) - np.asarray(outputs, dtype=np.float64)
    return np.sum(residual * residual, axis=1)


def mean_squared_error(predictions: np.ndarray, outputs: np.ndarray) -> float:
    # np.sum over a contiguous 1-D array is pairwise: fixed order, independent of chunking
    errors = np.ascontiguousarray(squared_errors(predictions, outputs))
    return float(np.sum(errors) / len(errors))


def training_mse(model: KnnModel, dataset: Dataset, workers: Optional[int] = None) -> float:
    """(1/n) sum_l ||predict(model, x_l) - y_l||^2 over the dataset the model was fitted on."""
    return mean_squared_error(training_predictions(model, dataset, workers=workers), dataset.outputs)


def predict_loo_batch(
    dataset: Dataset,
    k: int,
    rows: Optional[Sequence[int]] = None,
    index: Optional[NeighborIndex] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Held-out predictions: for each row l, the k-NN prediction at x_l from the
    data with row l removed. Returns (len(rows), M).
    """
    if dataset.n < 2:
        raise DatasetTooSmall(f"DatasetTooSmall: leave-one-out needs n >= 2, got n={dataset.n}")
    check_k(k, dataset.n - 1)
    rows = np.arange(dataset.n) if rows is None else np.asarray(rows, dtype=np.int64).reshape(-1)
    outside = rows[(rows < 0) | (rows >= dataset.n)]
    if len(outside):
        raise RowOutOfRange(int(outside[0]))
    if index is None:
        index = build_index(dataset.inputs)
    else:
        check_index(index, dataset)

    def run(chunk: range) -> np.ndarray:
        held_out = rows[chunk.start:chunk.stop]
        indices, _ = index.query_excluding_batch(dataset.inputs[held_out], k, held_out)
        return neighbor_means(dataset.outputs, indices)

    parts = get_row_pool(workers).map_rows(run, len(rows), name="predict_loo")
    get_counters().count(HELD_OUT_EVALUATIONS, len(rows))
    if not parts:
        return np.empty((0, dataset.n_outputs))
    return np.concatenate(parts, axis=0)


def predict_loo(dataset: Dataset, k: int, held_out: int, index: Optional[NeighborIndex] = None) -> np.ndarray:
    """k-NN prediction at x_l from the model fitted on the dataset without row l."""
    return predict_loo_batch(dataset, k, [held_out], index=index, workers=1)[0]


def loo_from_full_fit(model: KnnModel, dataset: Dataset, workers: Optional[int] = None) -> np.ndarray:
    """
    Held-out predictions for k = model.k - 1 recovered from the full-data fit:
    ((k+1)/k) * f_{k+1}(x_l) - y_l / k. Exact only when no two inputs coincide and
    no input is equidistant from two others.
    """
    k = model.k - 1
    if k < 1:
        raise InvalidKRange("InvalidKRange: model must use at least 2 neighbours")
    full = training_predictions(model, dataset, workers=workers)
    return (k + 1) / k * full - dataset.outputs / k
