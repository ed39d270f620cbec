# tools/test_neighbors.py
"""
Tests for the exact k-NN index: golden queries, the (distance, row) tie
order, agreement with a naive scan, and the neighbour-set identity.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
sys.path.insert(0, str(Path(__file__).parent))

from core.errors import (
    DimensionMismatch,
    EmptyDataset,
    InvalidKRange,
    KTooLarge,
    NonFiniteInput,
    RowOutOfRange,
)
from core.instrumentation import INDEX_BUILDS, QUERIES, get_counters
from knn_fixtures import GOLDEN_X, grid_points, naive_neighbors, random_dataset, tie_free_corpus
from neighbors import (
    build_index,
    knn_query,
    knn_query_batch,
    knn_query_excluding,
    knn_query_excluding_batch,
    squared_distances,
)


def test_golden_queries():
    """Nearest neighbours of 3 and 7 among {0, 1, 3, 7}."""
    index = build_index(GOLDEN_X)

    result = knn_query(index, [3.0], 2)
    assert result.indices.tolist() == [2, 1]
    assert result.distances.tolist() == [0.0, 2.0]

    result = knn_query(index, [7.0], 3)
    assert result.indices.tolist() == [3, 2, 1]
    assert result.distances.tolist() == [0.0, 4.0, 6.0]
    print(" Golden queries OK")


def test_golden_query_excluding():
    """Held-out neighbours of 3 with its own row removed."""
    index = build_index(GOLDEN_X)
    result = knn_query_excluding(index, [3.0], 2, excluded_row=2)
    assert result.indices.tolist() == [1, 0]
    assert result.distances.tolist() == [2.0, 3.0]


def test_scalar_query_accepted_in_one_dimension():
    """A bare float is one query against a 1-D index."""
    index = build_index(GOLDEN_X)
    assert knn_query(index, 0.9, 1).indices.tolist() == [1]


def test_flat_list_is_many_queries_in_one_dimension():
    """Over a 1-D index a flat list holds m scalar queries, not one m-D point."""
    index = build_index(GOLDEN_X)
    indices, distances = knn_query_batch(index, [0.2, 6.0, 3.1], 1)
    assert indices.tolist() == [[0], [3], [2]]
    assert distances.shape == (3, 1)
    with pytest.raises(DimensionMismatch):
        knn_query(index, [0.2, 6.0], 1)


def test_equal_distances_break_toward_smaller_row():
    """Equidistant candidates come back in ascending row order."""
    index = build_index([0.0, 2.0, 4.0])
    assert knn_query(index, [2.0], 2).indices.tolist() == [1, 0]
    assert knn_query(index, [1.0], 2).indices.tolist() == [0, 1]
    assert knn_query(index, [3.0], 2).indices.tolist() == [1, 2]


def test_duplicates_order_by_row():
    """Coincident points rank by row id, with and without exclusion."""
    index = build_index([[1.0], [5.0], [1.0], [1.0]])
    assert knn_query(index, [1.0], 3).indices.tolist() == [0, 2, 3]
    assert knn_query_excluding(index, [1.0], 2, excluded_row=0).indices.tolist() == [2, 3]


def test_excluded_row_missing_from_top_set():
    """Excluding a row that is not among the k+1 nearest just returns the k nearest."""
    index = build_index(GOLDEN_X)
    result = knn_query_excluding(index, [0.0], 2, excluded_row=3)
    assert result.indices.tolist() == [0, 1]


def test_k_equal_to_n_returns_everything():
    """k = n lists every row, nearest first."""
    index = build_index(GOLDEN_X)
    result = knn_query(index, [2.0], 4)
    assert sorted(result.indices.tolist()) == [0, 1, 2, 3]
    assert np.all(np.diff(result.distances) >= 0)


def test_errors():
    """Bad k, dimension, non-finite query and unknown excluded row."""
    index = build_index(GOLDEN_X)
    with pytest.raises(KTooLarge):
        knn_query(index, [0.0], 5)
    with pytest.raises(KTooLarge):
        knn_query_excluding(index, [0.0], 4, excluded_row=0)
    with pytest.raises(InvalidKRange):
        knn_query(index, [0.0], 0)
    with pytest.raises(DimensionMismatch):
        knn_query(build_index([[0.0, 1.0], [2.0, 3.0]]), [0.0, 1.0, 2.0], 1)
    with pytest.raises(NonFiniteInput):
        knn_query(index, [np.nan], 1)
    with pytest.raises(RowOutOfRange) as e:
        knn_query_excluding(index, [0.0], 1, excluded_row=9)
    assert e.value.row == 9
    assert e.value.exit_code == 2


def test_build_errors():
    """Empty, non-finite and ragged inputs are rejected."""
    with pytest.raises(EmptyDataset):
        build_index(np.empty((0, 2)))
    with pytest.raises(NonFiniteInput):
        build_index([[0.0, 1.0], [np.inf, 2.0]])
    with pytest.raises(DimensionMismatch):
        build_index([[0.0, 1.0], [2.0]])


def test_counters():
    """One build and one query per batch row are counted."""
    index = build_index(GOLDEN_X)
    knn_query_batch(index, [[0.0], [1.0], [2.0]], 1)
    counts = get_counters().snapshot()
    assert counts[INDEX_BUILDS] == 1
    assert counts[QUERIES] == 3


def test_index_is_read_only():
    """The index copies its input and refuses writes."""
    source = np.array([[0.0], [1.0]])
    index = build_index(source)
    source[0, 0] = 99.0
    assert index.points[0, 0] == 0.0
    with pytest.raises(ValueError):
        index.points[0, 0] = 5.0


@pytest.mark.parametrize("n", [1, 2, 17, 300])
@pytest.mark.parametrize("leaf_size", [1, 4, 16])
def test_tree_structure(n, leaf_size):
    """Leaves partition the rows left to right and respect the leaf size."""
    points = random_dataset(n, dim=3, seed=n).inputs
    index = build_index(points, leaf_size=leaf_size)
    starts, ends = index._leaf_start, index._leaf_end
    assert starts[0] == 0 and ends[-1] == n
    assert np.array_equal(starts[1:], ends[:-1])
    assert np.all(ends - starts <= leaf_size)
    assert index.node_count == 2 * index.leaf_count - 1
    assert sorted(index._tree_rows.tolist()) == list(range(n))


def test_all_coincident_points_form_one_leaf():
    """A node whose points all coincide is never split."""
    index = build_index(np.ones((50, 2)), leaf_size=4)
    assert index.leaf_count == 1
    assert knn_query(index, [1.0, 1.0], 3).indices.tolist() == [0, 1, 2]


@pytest.mark.parametrize("leaf_size", [1, 2, 16])
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_matches_naive_scan_on_tie_heavy_grid(leaf_size, dim):
    """Integer grids are full of duplicates and equidistant points; order must still match exactly."""
    points = grid_points(150, dim, levels=6, seed=dim * 10 + leaf_size)
    queries = grid_points(40, dim, levels=7, seed=99)
    index = build_index(points, leaf_size=leaf_size)

    for k in (1, 4, 17, 150):
        indices, distances = knn_query_batch(index, queries, k)
        for q, got, dist in zip(queries, indices, distances):
            expected = naive_neighbors(points, q, k)
            assert got.tolist() == expected
            assert np.array_equal(dist, np.sqrt(squared_distances(points[expected], q)))


@pytest.mark.parametrize("seed", range(10))
def test_matches_full_sort_on_continuous_data(seed):
    """100 random queries per dataset, D from 1 to 10 and n up to 500: indices and distances exact."""
    rng = np.random.default_rng(1000 + seed)
    dim = 1 + seed
    n = 50 * (seed + 1)
    points = rng.standard_normal((n, dim))
    queries = rng.standard_normal((100, dim))
    k = int(rng.integers(1, min(n, 40) + 1))
    index = build_index(points)

    indices, distances = knn_query_batch(index, queries, k)
    for q, got, dist in zip(queries, indices, distances):
        expected = naive_neighbors(points, q, k)
        assert got.tolist() == expected
        assert np.array_equal(dist, np.sqrt(squared_distances(points[expected], q)))


@pytest.mark.parametrize("leaf_size", [1, 16])
def test_excluding_batch_matches_naive_scan(leaf_size):
    """Every row held out in turn, on a tie-heavy grid."""
    points = grid_points(80, 2, levels=5, seed=leaf_size)
    index = build_index(points, leaf_size=leaf_size)
    rows = np.arange(len(points))
    for k in (1, 3, 10, 79):
        indices, _ = knn_query_excluding_batch(index, points, k, rows)
        for ell in rows:
            assert indices[ell].tolist() == naive_neighbors(points, points[ell], k, exclude=ell)


@pytest.mark.parametrize("seed", range(5))
def test_permuted_insertion_order_gives_identical_lists(seed):
    """Building over shuffled rows (ids carried along) changes the tree, never the answers."""
    points = grid_points(120, 2, levels=5, seed=seed)
    perm = np.random.default_rng(seed).permutation(len(points))
    base = build_index(points)
    shuffled = build_index(points[perm], row_ids=perm, leaf_size=3)

    for k in (1, 5, 30, 120):
        a_rows, a_dist = knn_query_batch(base, points, k)
        b_rows, b_dist = knn_query_batch(shuffled, points, k)
        assert np.array_equal(a_rows, b_rows)
        assert np.array_equal(a_dist, b_dist)

    single_a = knn_query(base, points[7], 9)
    single_b = knn_query(shuffled, points[7], 9)
    assert np.array_equal(single_a.indices, single_b.indices)
    assert np.array_equal(single_a.distances, single_b.distances)


def test_batch_equals_single_queries():
    """Batch rows equal the one-at-a-time answers bit for bit."""
    data = random_dataset(300, dim=4, seed=3)
    index = build_index(data.inputs)
    indices, distances = knn_query_batch(index, data.inputs[:25], 7)
    for i in range(25):
        single = knn_query(index, data.inputs[i], 7)
        assert np.array_equal(single.indices, indices[i])
        assert np.array_equal(single.distances, distances[i])


def test_translation_and_axis_permutation_keep_neighbours():
    """Moving the cloud rigidly leaves every neighbour list unchanged."""
    data = random_dataset(200, dim=3, seed=11)
    moved = data.inputs[:, [2, 0, 1]] + np.array([5.0, -3.0, 0.25])
    a = build_index(data.inputs)
    b = build_index(moved)
    ia, _ = knn_query_batch(a, data.inputs, 6)
    ib, _ = knn_query_batch(b, moved, 6)
    assert np.array_equal(ia, ib)


@pytest.mark.parametrize("factor", [3.7, 0.01, 250.0])
def test_positive_scaling_keeps_neighbours(factor):
    """Scaling every coordinate by one positive constant leaves neighbour lists unchanged."""
    data = random_dataset(200, dim=4, seed=12)
    scaled = data.inputs * factor
    ia, _ = knn_query_batch(build_index(data.inputs), data.inputs, 6)
    ib, _ = knn_query_batch(build_index(scaled), scaled, 6)
    assert np.array_equal(ia, ib)
    held_a, _ = knn_query_excluding_batch(build_index(data.inputs), data.inputs, 4, np.arange(200))
    held_b, _ = knn_query_excluding_batch(build_index(scaled), scaled, 4, np.arange(200))
    assert np.array_equal(held_a, held_b)


def test_custom_row_ids_are_reported():
    """Queries report the ids given at build time."""
    index = build_index([[0.0], [1.0], [3.0]], row_ids=[10, 20, 30])
    assert knn_query(index, [2.9], 2).indices.tolist() == [30, 20]
    assert knn_query_excluding(index, [2.9], 1, excluded_row=30).indices.tolist() == [20]


@pytest.mark.slow
def test_neighbour_set_identity_on_corpus():
    """NN(x_l, k, X without x_l) plus l equals NN(x_l, k+1, X), exactly, on tie-free data."""
    for data in tie_free_corpus():
        index = build_index(data.inputs)
        rows = np.arange(data.n)
        for k in range(1, min(25, data.n - 1) + 1):
            held_out, _ = knn_query_excluding_batch(index, data.inputs, k, rows)
            full, _ = knn_query_batch(index, data.inputs, k + 1)
            left = np.sort(np.column_stack([held_out, rows]), axis=1)
            right = np.sort(full, axis=1)
            assert np.array_equal(left, right), f"n={data.n} D={data.dim} k={k}"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
