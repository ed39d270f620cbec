# neighbors/__init__.py
from neighbors.kd_tree import (
    NeighborIndex,
    NeighborList,
    build_index,
    knn_query,
    knn_query_batch,
    knn_query_excluding,
    knn_query_excluding_batch,
    squared_distances,
)

__all__ = [
    "NeighborIndex",
    "NeighborList",
    "build_index",
    "knn_query",
    "knn_query_batch",
    "knn_query_excluding",
    "knn_query_excluding_batch",
    "squared_distances",
]
