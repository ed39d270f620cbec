# regression/dataset.py
"""Training data: n inputs in R^D paired with n outputs in R^M, plus row identities."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import DimensionMismatch, NonFiniteInput
from neighbors.kd_tree import as_points


@dataclass(frozen=True, eq=False)
class Dataset:
    inputs: np.ndarray
    outputs: np.ndarray
    feature_names: Tuple[str, ...]
    target_names: Tuple[str, ...]
    row_ids: np.ndarray

    @classmethod
    def from_arrays(
        cls,
        inputs,
        outputs,
        feature_names: Optional[Sequence[str]] = None,
        target_names: Optional[Sequence[str]] = None,
        row_ids: Optional[Sequence[int]] = None,
    ) -> "Dataset":
        x = np.array(as_points(inputs, "inputs"), dtype=np.float64, copy=True)
        y = np.array(outputs, dtype=np.float64, copy=True)
        if y.ndim == 1:
            y = y.reshape(-1, 1)
        if y.ndim != 2 or y.shape[1] == 0:
            raise DimensionMismatch(f"DimensionMismatch: outputs must be (n, M), got shape {y.shape}")
        if len(y) != len(x):
            raise DimensionMismatch(f"DimensionMismatch: {len(x)} inputs but {len(y)} outputs")
        if not np.all(np.isfinite(y)):
            bad = int(np.argwhere(~np.isfinite(y))[0][0])
            raise NonFiniteInput(f"NonFiniteInput: outputs row {bad} contains NaN or Inf")

        n, d = x.shape
        m = y.shape[1]
        features = tuple(feature_names) if feature_names is not None else tuple(f"x{i + 1}" for i in range(d))
        targets = tuple(target_names) if target_names is not None else tuple(f"y{i + 1}" for i in range(m))
        if len(features) != d or len(targets) != m:
            raise DimensionMismatch("DimensionMismatch: column names do not match the data shape")

        ids = np.arange(n, dtype=np.int64) if row_ids is None else np.array(row_ids, dtype=np.int64).reshape(-1)
        if len(ids) != n:
            raise DimensionMismatch(f"DimensionMismatch: {n} rows but {len(ids)} row ids")

        for arr in (x, y, ids):
            arr.setflags(write=False)
        return cls(inputs=x, outputs=y, feature_names=features, target_names=targets, row_ids=ids)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.outputs.shape[1]

    def __len__(self) -> int:
        return self.n

    def select_rows(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset.from_arrays(
            self.inputs[rows], self.outputs[rows], self.feature_names, self.target_names, self.row_ids[rows]
        )

    def prefix(self, n: int) -> "Dataset":
        return self.select_rows(np.arange(min(n, self.n)))

    def without_row(self, row: int) -> "Dataset":
        keep = np.arange(self.n) != row
        return self.select_rows(np.nonzero(keep)[0])

    def with_outputs(self, outputs, target_names: Optional[Sequence[str]] = None) -> "Dataset":
        """Same inputs, new outputs. Target names carry over only while M is unchanged."""
        y = np.asarray(outputs, dtype=np.float64)
        width = 1 if y.ndim <= 1 else y.shape[-1]
        if target_names is None and width == self.n_outputs:
            target_names = self.target_names
        return Dataset.from_arrays(self.inputs, y, self.feature_names, target_names, self.row_ids)

    def with_inputs(self, inputs, feature_names: Optional[Sequence[str]] = None) -> "Dataset":
        x = as_points(inputs, "inputs")
        if feature_names is None and x.shape[1] == self.dim:
            feature_names = self.feature_names
        return Dataset.from_arrays(x, self.outputs, feature_names, self.target_names, self.row_ids)
