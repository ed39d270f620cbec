# data/synth.py
"""
Synthetic regression data y = f(x) + noise.
Inputs are uniform on [-1, 1]^D, so inputs (and distances, for D >= 2) are
distinct with probability one.
"""

from typing import Optional

import numpy as np

from regression.dataset import Dataset


def true_function(inputs: np.ndarray, n_outputs: int = 1) -> np.ndarray:
    """f_m(x) = sin(sum_d x_d + m) + 0.5 * cos(2 * x_1), m = 0..M-1."""
    x = np.asarray(inputs, dtype=np.float64)
    total = x.sum(axis=1)
    wobble = 0.5 * np.cos(2.0 * x[:, 0])
    return np.column_stack([np.sin(total + m) + wobble for m in range(n_outputs)])


def make_synthetic(
    n: int,
    dim: int = 2,
    n_outputs: int = 1,
    noise: float = 0.1,
    seed: Optional[int] = 0,
) -> Dataset:
    if n < 1 or dim < 1 or n_outputs < 1:
        raise ValueError(f"n, dim and n_outputs must be >= 1 (got {n}, {dim}, {n_outputs})")
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")

    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(n, dim))
    y = true_function(x, n_outputs) + noise * rng.standard_normal((n, n_outputs))
    return Dataset.from_arrays(x, y)
