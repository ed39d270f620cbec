# regression/__init__.py
from regression.dataset import Dataset
from regression.knn import (
    KnnModel,
    fit,
    loo_from_full_fit,
    mean_squared_error,
    predict,
    predict_batch,
    predict_loo,
    predict_loo_batch,
    training_mse,
    training_predictions,
)

__all__ = [
    "Dataset",
    "KnnModel",
    "fit",
    "loo_from_full_fit",
    "mean_squared_error",
    "predict",
    "predict_batch",
    "predict_loo",
    "predict_loo_batch",
    "training_mse",
    "training_predictions",
]
