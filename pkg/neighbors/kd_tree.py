# neighbors/kd_tree.py
"""
Exact Euclidean k-NN search over an immutable kd-tree.

Ordering is total: candidates are ranked by squared distance, then by row id,
so equal distances always come back in ascending row order regardless of how
the tree happened to partition the points.

Build: median split on the widest-spread coordinate until a node holds at most
leaf_size points (or all of its points coincide), splitting a whole tree level
per step. Queries are answered in
batches: queries are grouped by the leaf they descend into, and each group
visits leaves in ascending order of its bounding-box lower bound, scanning a
leaf exhaustively whenever the bound does not exceed a query's current k-th
best squared distance.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    DimensionMismatch,
    EmptyDataset,
    InvalidKRange,
    KTooLarge,
    NonFiniteInput,
    RowOutOfRange,
)
from core.instrumentation import INDEX_BUILDS, QUERIES, get_counters
from core.logs import get_logger
from core.settings import get_settings

logger = get_logger("neighbors")

# Queries searched together against one leaf ordering
QUERY_GROUP_SIZE = 256


def squared_distances(points, query) -> np.ndarray:
    """
    Squared Euclidean distance between points (..., D) and query (..., D),
    broadcast over the leading axes.

    Coordinates are accumulated left to right in a fixed order, so the same
    pair of points yields the same bits whatever the array shapes involved.
    Every component that compares distances uses this function.
    """
    points = np.asarray(points, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    diff = points[..., 0] - query[..., 0]
    total = diff * diff
    for d in range(1, points.shape[-1]):
        diff = points[..., d] - query[..., d]
        total = total + diff * diff
    return total


@dataclass(frozen=True)
class NeighborList:
    """k nearest training rows of one query, nearest first."""

    indices: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)

    def as_set(self) -> set:
        return set(int(i) for i in self.indices)


def as_points(points, what: str = "points") -> np.ndarray:
    """Validate and convert a sequence of points to a float64 (n, D) array."""
    if isinstance(points, np.ndarray):
        arr = points
    else:
        rows = list(points)
        if rows and isinstance(rows[0], (list, tuple, np.ndarray)):
            dims = {len(r) for r in rows}
            if len(dims) > 1:
                raise DimensionMismatch(f"{what} have differing dimensions: {sorted(dims)}")
        arr = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, 0))

    if arr.dtype == object:
        raise DimensionMismatch(f"{what} have differing dimensions")
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{what} must be a 2-D array, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise EmptyDataset(f"EmptyDataset: no {what} given")
    if arr.shape[1] == 0:
        raise DimensionMismatch(f"{what} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        bad = int(np.argwhere(~np.isfinite(arr))[0][0])
        raise NonFiniteInput(f"NonFiniteInput: {what} row {bad} contains NaN or Inf")
    return arr


class NeighborIndex:
    """Immutable kd-tree over n training points. Build with build_index()."""

    def __init__(self, points: np.ndarray, row_ids: np.ndarray, leaf_size: int):
        self._points = points
        self._row_ids = row_ids
        self.n, self.dim = points.shape
        self.leaf_size = leaf_size
        self._build()

        for arr in (
            self._points, self._row_ids, self._order, self._tree_points, self._tree_rows,
            self._left, self._right, self._split_dim, self._split_val, self._leaf_of_node,
            self._leaf_start, self._leaf_end, self._leaf_lo, self._leaf_hi,
        ):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @staticmethod
    def _slice_bounds(tree: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-coordinate min and max of tree[s:e] for every (s, e); slices ascending and disjoint."""
        # One padding row so an end equal to n is still a valid reduceat offset
        padded = np.concatenate([tree, tree[-1:]], axis=0)
        offsets = np.column_stack((starts, ends)).reshape(-1)
        lo = np.minimum.reduceat(padded, offsets, axis=0)[::2]
        hi = np.maximum.reduceat(padded, offsets, axis=0)[::2]
        return lo, hi

    def _build(self):
        """Split every node of one depth at once; the Python loop runs once per level."""
        points = self._points
        n = self.n
        order = np.arange(n)

        # Non-empty leaves: at most 2n - 1 nodes
        capacity = 2 * n
        left = np.full(capacity, -1, dtype=np.int64)
        right = np.full(capacity, -1, dtype=np.int64)
        split_dim = np.zeros(capacity, dtype=np.int64)
        split_val = np.zeros(capacity, dtype=np.float64)
        node_count = 1

        nodes = np.zeros(1, dtype=np.int64)
        starts = np.zeros(1, dtype=np.int64)
        ends = np.full(1, n, dtype=np.int64)
        leaves: List[Tuple[np.ndarray, ...]] = []

        while len(nodes):
            lo, hi = self._slice_bounds(points[order], starts, ends)
            spread = hi - lo
            dims = np.argmax(spread, axis=1)
            widest = spread[np.arange(len(nodes)), dims]
            is_leaf = (ends - starts <= self.leaf_size) | (widest == 0)
            leaves.append((nodes[is_leaf], starts[is_leaf], ends[is_leaf], lo[is_leaf], hi[is_leaf]))

            splitting = ~is_leaf
            if not splitting.any():
                break
            nodes, s, e, d = nodes[splitting], starts[splitting], ends[splitting], dims[splitting]

            # Sort each node's slice on its split coordinate; the middle element is then the median
            lengths = e - s
            owner = np.repeat(np.arange(len(nodes)), lengths)
            offset_in_slice = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
            positions = offset_in_slice + np.repeat(s, lengths)
            keys = points[order[positions], d[owner]]
            order[positions] = order[positions][np.lexsort((keys, owner))]

            mid = s + lengths // 2
            split_dim[nodes] = d
            split_val[nodes] = points[order[mid], d]
            children = node_count + 2 * np.arange(len(nodes))
            left[nodes] = children
            right[nodes] = children + 1
            node_count += 2 * len(nodes)

            nodes = np.column_stack((children, children + 1)).reshape(-1)
            starts = np.column_stack((s, mid)).reshape(-1)
            ends = np.column_stack((mid, e)).reshape(-1)

        leaf_nodes, leaf_start, leaf_end, leaf_lo, leaf_hi = (np.concatenate(parts) for parts in zip(*leaves))
        # Number leaves left to right
        by_start = np.argsort(leaf_start, kind="stable")
        leaf_of_node = np.full(node_count, -1, dtype=np.int64)
        leaf_of_node[leaf_nodes[by_start]] = np.arange(len(by_start))

        self._order = order
        self._tree_points = np.ascontiguousarray(points[order])
        self._tree_rows = self._row_ids[order]
        self._left = left[:node_count]
        self._right = right[:node_count]
        self._split_dim = split_dim[:node_count]
        self._split_val = split_val[:node_count]
        self._leaf_of_node = leaf_of_node
        self._leaf_start = leaf_start[by_start]
        self._leaf_end = leaf_end[by_start]
        self._leaf_lo = np.ascontiguousarray(leaf_lo[by_start]).reshape(-1, self.dim)
        self._leaf_hi = np.ascontiguousarray(leaf_hi[by_start]).reshape(-1, self.dim)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def row_ids(self) -> np.ndarray:
        return self._row_ids

    @property
    def node_count(self) -> int:
        return len(self._left)

    @property
    def leaf_count(self) -> int:
        return len(self._leaf_start)

    # ------------------------------------------------------------------
    # search
    # ------------------------------------------------------------------

    def as_queries(self, queries) -> np.ndarray:
        """
        Queries as an (m, D) array. A flat sequence is one point, except over a
        1-D index where it is m scalar queries; a bare scalar is one 1-D point.
        """
        q = np.asarray(queries, dtype=np.float64)
        if q.ndim == 1 and self.dim == 1:
            q = q.reshape(-1, 1)
        elif q.ndim <= 1:
            q = q.reshape(1, -1)
        if q.ndim != 2 or q.shape[1] != self.dim:
            raise DimensionMismatch(
                f"DimensionMismatch: query dimension {q.shape[-1] if q.ndim else 0} != index dimension {self.dim}"
            )
        if not np.all(np.isfinite(q)):
            raise NonFiniteInput("NonFiniteInput: query contains NaN or Inf")
        return q

    def _check_k(self, k: int, limit: int):
        if k < 1:
            raise InvalidKRange(f"InvalidKRange: k must be >= 1, got {k}")
        if k > limit:
            raise KTooLarge(k, limit)

    def _descend(self, queries: np.ndarray) -> np.ndarray:
        """Leaf number each query falls into."""
        node = np.zeros(len(queries), dtype=np.int64)
        while True:
            internal = np.nonzero(self._left[node] >= 0)[0]
            if len(internal) == 0:
                break
            nd = node[internal]
            go_left = queries[internal, self._split_dim[nd]] < self._split_val[nd]
            node[internal] = np.where(go_left, self._left[nd], self._right[nd])
        return self._leaf_of_node[node]

    def _box_lower_bounds(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """
        Squared gap between the box [lo, hi] and every leaf box, shape (leaves,).
        Per coordinate the gap is at most the computed |point - query| for any
        query in the box and point in the leaf, and the squares are summed in the
        order squared_distances uses, so the bound never exceeds a computed distance.
        """
        total = None
        for d in range(self.dim):
            gap = np.maximum(np.maximum(self._leaf_lo[:, d] - hi[d], lo[d] - self._leaf_hi[:, d]), 0.0)
            total = gap * gap if total is None else total + gap * gap
        return total

    def _leaf_lower_bound(self, queries: np.ndarray, leaf: int) -> np.ndarray:
        """Squared distance from each query to one leaf box, shape (m,)."""
        nearest = np.minimum(np.maximum(queries, self._leaf_lo[leaf]), self._leaf_hi[leaf])
        return squared_distances(nearest, queries)

    def _search_group(self, queries: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
        g = len(queries)
        group_lower = self._box_lower_bounds(queries.min(axis=0), queries.max(axis=0))
        visit = np.argsort(group_lower, kind="stable")

        best_d2 = np.full((g, k), np.inf)
        best_rows = np.full((g, k), np.iinfo(np.int64).max, dtype=np.int64)

        for leaf in visit:
            radius = best_d2[:, -1]
            # Strict: a leaf at exactly the k-th distance may hold a smaller row id
            if group_lower[leaf] > radius.max():
                break
            active = np.nonzero(self._leaf_lower_bound(queries, leaf) <= radius)[0]
            if len(active) == 0:
                continue

            s, e = self._leaf_start[leaf], self._leaf_end[leaf]
            d2 = squared_distances(self._tree_points[None, s:e, :], queries[active][:, None, :])
            rows = np.broadcast_to(self._tree_rows[s:e], d2.shape)

            cand_d2 = np.concatenate([best_d2[active], d2], axis=1)
            cand_rows = np.concatenate([best_rows[active], rows], axis=1)
            pick = np.lexsort((cand_rows, cand_d2), axis=-1)[:, :k]
            best_d2[active] = np.take_along_axis(cand_d2, pick, axis=1)
            best_rows[active] = np.take_along_axis(cand_rows, pick, axis=1)

        return best_rows, best_d2

    def query_batch(self, queries, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        k nearest rows for each query.

        Returns:
            (indices, distances), both shaped (m, k), nearest first, equal
            distances in ascending row order.
        """
        q = self.as_queries(queries)
        self._check_k(k, self.n)
        m = len(q)
        get_counters().count(QUERIES, m)

        indices = np.empty((m, k), dtype=np.int64)
        sq = np.empty((m, k), dtype=np.float64)

        by_leaf = np.argsort(self._descend(q), kind="stable")
        for start in range(0, m, QUERY_GROUP_SIZE):
            members = by_leaf[start:start + QUERY_GROUP_SIZE]
            rows, d2 = self._search_group(q[members], k)
            indices[members] = rows
            sq[members] = d2

        return indices, np.sqrt(sq)

    def query(self, query, k: int) -> NeighborList:
        indices, distances = self.query_batch(query, k)
        if indices.shape[0] != 1:
            raise DimensionMismatch("query() takes a single point; use query_batch() for many")
        return NeighborList(indices=indices[0], distances=distances[0])

    def query_excluding_batch(self, queries, k: int, excluded_rows) -> Tuple[np.ndarray, np.ndarray]:
        """
        k nearest rows of each query with one row removed per query.
        Queries k+1 and drops the excluded row if present, else the last entry.
        """
        self._check_k(k, self.n - 1)
        excluded = np.asarray(excluded_rows, dtype=np.int64).reshape(-1)
        indices, distances = self.query_batch(queries, k + 1)
        if len(excluded) != len(indices):
            raise DimensionMismatch(
                f"DimensionMismatch: {len(indices)} queries but {len(excluded)} excluded rows"
            )

        keep = indices != excluded[:, None]
        # Stable sort moves the excluded slot (if any) to the end; otherwise slot k goes
        pick = np.argsort(~keep, axis=1, kind="stable")[:, :k]
        return np.take_along_axis(indices, pick, axis=1), np.take_along_axis(distances, pick, axis=1)

    def query_excluding(self, query, k: int, excluded_row: int) -> NeighborList:
        self._check_row(excluded_row)
        indices, distances = self.query_excluding_batch(query, k, [excluded_row])
        return NeighborList(indices=indices[0], distances=distances[0])

    def _check_row(self, row: int):
        if not np.any(self._row_ids == row):
            raise RowOutOfRange(row, "excluded row")


def build_index(points, leaf_size: Optional[int] = None, row_ids: Optional[Sequence[int]] = None) -> NeighborIndex:
    """
    Build an exact k-NN index.

    Args:
        points: n points of dimension D (sequence of sequences or (n, D) array)
        leaf_size: maximum points per leaf (defaults to LOOCV_LEAF_SIZE)
        row_ids: identities reported by queries and used for tie order
                 (defaults to 0..n-1)
    """
    arr = as_points(points)
    arr = np.array(arr, dtype=np.float64, copy=True)
    n = arr.shape[0]

    if row_ids is None:
        ids = np.arange(n, dtype=np.int64)
    else:
        ids = np.array(row_ids, dtype=np.int64, copy=True).reshape(-1)
        if len(ids) != n:
            raise DimensionMismatch(f"DimensionMismatch: {n} points but {len(ids)} row ids")

    leaf = leaf_size or get_settings().leaf_size
    index = NeighborIndex(arr, ids, max(1, int(leaf)))
    get_counters().count(INDEX_BUILDS)
    logger.debug(f"Index built: n={index.n}, D={index.dim}, leaves={index.leaf_count}")
    return index


def knn_query(index: NeighborIndex, query, k: int) -> NeighborList:
    return index.query(query, k)


def knn_query_batch(index: NeighborIndex, queries, k: int) -> Tuple[np.ndarray, np.ndarray]:
    return index.query_batch(queries, k)


def knn_query_excluding(index: NeighborIndex, query, k: int, excluded_row: int) -> NeighborList:
    return index.query_excluding(query, k, excluded_row)


def knn_query_excluding_batch(index: NeighborIndex, queries, k: int, excluded_rows) -> Tuple[np.ndarray, np.ndarray]:
    return index.query_excluding_batch(queries, k, excluded_rows)
