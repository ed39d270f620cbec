# data/preprocess.py
"""Feature standardization: zero mean, unit population standard deviation."""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from core.errors import ConstantFeature, DatasetTooSmall
from core.logs import get_logger
from regression.dataset import Dataset

logger = get_logger("data")


@dataclass(frozen=True, eq=False)
class Scaling:
    """Per-feature statistics used to standardize a dataset."""

    feature_names: Tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray

    def as_dict(self) -> Dict[str, Tuple[float, float]]:
        return {name: (float(m), float(s)) for name, m, s in zip(self.feature_names, self.mean, self.std)}

    def apply(self, inputs: np.ndarray) -> np.ndarray:
        return (np.asarray(inputs, dtype=np.float64) - self.mean) / self.std


def standardize(dataset: Dataset) -> Tuple[Dataset, Scaling]:
    """
    Centre each feature and divide by its population standard deviation (divisor n).
    Outputs are left untouched.
    """
    if dataset.n < 2:
        raise DatasetTooSmall(f"DatasetTooSmall: standardization needs n >= 2, got n={dataset.n}")

    mean = dataset.inputs.mean(axis=0)
    std = dataset.inputs.std(axis=0, ddof=0)
    for name, s in zip(dataset.feature_names, std):
        if s == 0:
            raise ConstantFeature(name)

    scaling = Scaling(feature_names=dataset.feature_names, mean=mean, std=std)
    logger.debug(f"Standardized {dataset.dim} features over n={dataset.n}")
    return dataset.with_inputs(scaling.apply(dataset.inputs)), scaling
