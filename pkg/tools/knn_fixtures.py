# tools/knn_fixtures.py
"""
Shared test data and naive reference implementations.
The references use plain loops over squared_distances so they share the
distance bits of the index but none of its search logic.
"""

import sys
from itertools import product
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from neighbors.kd_tree import squared_distances  # noqa: E402
from regression.dataset import Dataset  # noqa: E402

GOLDEN_X = [0.0, 1.0, 3.0, 7.0]
GOLDEN_SCORES = {1: 5.5, 2: 8.875}

CORPUS_SIZES = (10, 100, 1000)
CORPUS_DIMS = (1, 3, 10)
CORPUS_OUTPUTS = (1, 2)


def golden_dataset() -> Dataset:
    return Dataset.from_arrays(GOLDEN_X, GOLDEN_X)


def random_dataset(n: int, dim: int = 2, n_outputs: int = 1, seed: int = 0) -> Dataset:
    """Continuous draws: no duplicate inputs and no distance ties with probability one."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, dim))
    y = rng.standard_normal((n, n_outputs))
    return Dataset.from_arrays(x, y)


def tie_free_corpus(count: int = 200, seed: int = 2024) -> Iterator[Dataset]:
    """count datasets cycling through every (n, D, M) combination."""
    combos = list(product(CORPUS_SIZES, CORPUS_DIMS, CORPUS_OUTPUTS))
    for i in range(count):
        n, dim, m = combos[i % len(combos)]
        yield random_dataset(n, dim, m, seed=seed + i)


def quantized_dataset(n: int = 300, step: float = 0.1, seed: int = 5) -> Dataset:
    """One normal feature rounded to a grid: many duplicate inputs, noisy smooth outputs."""
    rng = np.random.default_rng(seed)
    x = np.round(rng.standard_normal(n) / step) * step
    y = np.sin(2.0 * x) + 0.3 * rng.standard_normal(n)
    return Dataset.from_arrays(x, y, feature_names=["x"], target_names=["y"])


def grid_points(n: int, dim: int, levels: int, seed: int) -> np.ndarray:
    """Small integer grid: duplicates and exact distance ties everywhere."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, levels, size=(n, dim)).astype(np.float64)


# ===========================================
# NAIVE REFERENCES
# ===========================================

def naive_neighbors(points: np.ndarray, query: np.ndarray, k: int, exclude: int = -1) -> List[int]:
    """k nearest rows by (squared distance, row), with one row optionally skipped."""
    d2 = squared_distances(points, query)
    ranked = sorted((float(d2[i]), i) for i in range(len(points)) if i != exclude)
    return [i for _, i in ranked[:k]]


def naive_loocv(x: np.ndarray, y: np.ndarray, k: int) -> float:
    total = 0.0
    for ell in range(len(x)):
        rows = naive_neighbors(x, x[ell], k, exclude=ell)
        residual = y[rows].mean(axis=0) - y[ell]
        total += float(residual @ residual)
    return total / len(x)


def naive_ties(points: np.ndarray) -> Tuple[List[Tuple[int, ...]], List[Tuple[int, int, int]]]:
    """Duplicate groups and equidistant triples by exhaustive O(n^3) search."""
    groups = {}
    for i, row in enumerate(points):
        groups.setdefault(tuple(row.tolist()), []).append(i)
    duplicates = sorted(tuple(g) for g in groups.values() if len(g) >= 2)

    n = len(points)
    d2 = np.vstack([squared_distances(points, points[ell]) for ell in range(n)])
    triples = []
    for ell in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                if ell not in (i, j) and d2[ell, i] == d2[ell, j]:
                    triples.append((ell, i, j))
    return duplicates, triples


def naive_dedupe(x: np.ndarray, y: np.ndarray):
    """Group-and-average in first-occurrence order: (inputs, outputs, first rows)."""
    groups = {}
    for i, row in enumerate(x):
        groups.setdefault(tuple(row.tolist()), []).append(i)
    firsts = [rows[0] for rows in groups.values()]
    means = [y[rows].mean(axis=0) for rows in groups.values()]
    return x[firsts], np.array(means), np.array(firsts)
