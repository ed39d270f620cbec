# data/ties.py
"""
Tie diagnostics and duplicate resolution.

Nearest-neighbour sets are only unique when no two inputs coincide and no
input is equidistant from two others. detect_ties checks both conditions
exactly (no epsilon); resolve_duplicates removes the first kind of violation
by averaging the outputs of rows that share an input.
"""

from dataclasses import dataclass
from itertools import combinations, islice
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.logs import get_logger
from core.settings import get_settings
from neighbors.kd_tree import squared_distances
from regression.dataset import Dataset

logger = get_logger("data")


@dataclass(frozen=True)
class TieReport:
    n: int
    duplicate_groups: Tuple[Tuple[int, ...], ...]
    tie_triples: Tuple[Tuple[int, int, int], ...]
    triples_evaluated: bool
    triple_count: int
    truncated: bool = False

    @property
    def assumption_holds(self) -> bool:
        return not self.duplicate_groups and self.triple_count == 0

    @property
    def duplicate_rows(self) -> int:
        return sum(len(g) for g in self.duplicate_groups)

    @property
    def duplicate_rate(self) -> float:
        return self.duplicate_rows / self.n if self.n else 0.0

    def summary(self) -> str:
        if self.triples_evaluated:
            listed = f", {len(self.tie_triples)} listed" if self.truncated else ""
            triples = f"{self.triple_count} equidistant triples{listed}"
        else:
            triples = "distance ties not evaluated (n above scan cap)"
        status = "holds" if self.assumption_holds else "VIOLATED"
        return (
            f"tie-breaking assumption {status}: n={self.n}, "
            f"{len(self.duplicate_groups)} duplicate groups covering {self.duplicate_rows} rows "
            f"({self.duplicate_rate:.1%}), {triples}"
        )

    def as_dict(self) -> Dict:
        return {
            "n": self.n,
            "assumption_holds": self.assumption_holds,
            "duplicate_groups": [list(g) for g in self.duplicate_groups],
            "tie_triples": [list(t) for t in self.tie_triples],
            "triples_evaluated": self.triples_evaluated,
            "triple_count": self.triple_count,
            "truncated": self.truncated,
        }


def _inputs_of(data) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.inputs
    x = np.asarray(data, dtype=np.float64)
    return x.reshape(-1, 1) if x.ndim == 1 else x


def find_duplicate_groups(inputs: np.ndarray) -> List[Tuple[int, ...]]:
    """Groups (size >= 2) of rows with equal inputs, ascending within and ordered by first row."""
    if len(inputs) == 0:
        return []
    _, inverse, counts = np.unique(inputs, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    rows = np.nonzero(counts[inverse] >= 2)[0]
    if len(rows) == 0:
        return []

    rows = rows[np.lexsort((rows, inverse[rows]))]
    labels = inverse[rows]
    cuts = np.nonzero(np.diff(labels))[0] + 1
    groups = [tuple(int(r) for r in part) for part in np.split(rows, cuts)]
    groups.sort(key=lambda g: g[0])
    return groups


def detect_ties(
    data,
    scan_cap: Optional[int] = None,
    triple_cap: Optional[int] = None,
    max_triples: Optional[int] = None,
) -> TieReport:
    """
    Catalogue duplicate inputs and equidistant triples (l, i, j), i < j, both != l,
    with d(x_l, x_i) == d(x_l, x_j) exactly.

    The duplicate check always runs. The distance check runs only when n is within
    both scan caps; otherwise triples_evaluated is False.
    """
    settings = get_settings()
    scan_cap = settings.tie_scan_cap if scan_cap is None else scan_cap
    triple_cap = settings.triple_scan_cap if triple_cap is None else triple_cap
    max_triples = settings.max_triples if max_triples is None else max_triples

    x = _inputs_of(data)
    n = len(x)
    groups = find_duplicate_groups(x)

    evaluated = n <= scan_cap and n <= triple_cap
    triples: List[Tuple[int, int, int]] = []
    count = 0

    if evaluated:
        everyone = np.arange(n)
        for ell in range(n):
            others = everyone[everyone != ell]
            d2 = squared_distances(x[others], x[ell])
            order = np.argsort(d2, kind="stable")
            equal_next = np.diff(d2[order]) == 0
            if not equal_next.any():
                continue

            # Runs of equal sorted distances: [start, end] inclusive in sorted positions
            edges = np.diff(np.concatenate(([False], equal_next, [False])).astype(np.int8))
            run_starts = np.nonzero(edges == 1)[0]
            run_ends = np.nonzero(edges == -1)[0]
            found: List[Tuple[int, int, int]] = []
            for start, end in zip(run_starts, run_ends):
                members = np.sort(others[order[start:end + 1]])
                r = len(members)
                count += r * (r - 1) // 2
                budget = max_triples - len(triples)
                # combinations() yields pairs in sorted order, so the first `budget`
                # pairs of every run contain the first `budget` triples overall
                pairs = islice(combinations(members.tolist(), 2), max(0, budget))
                found.extend((ell, i, j) for i, j in pairs)
            found.sort()
            triples.extend(found[: max(0, max_triples - len(triples))])

    report = TieReport(
        n=n,
        duplicate_groups=tuple(groups),
        tie_triples=tuple(triples),
        triples_evaluated=evaluated,
        triple_count=count,
        truncated=count > len(triples),
    )
    logger.info(report.summary())
    return report


def resolve_duplicates(dataset: Dataset) -> Dataset:
    """
    Collapse each group of rows sharing an input into one row whose output is the
    componentwise mean of the group. Surviving rows keep first-occurrence order
    and the row id of the first occurrence.
    """
    _, first, inverse = np.unique(dataset.inputs, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    if len(first) == dataset.n:
        return dataset

    sums = np.zeros((len(first), dataset.n_outputs))
    np.add.at(sums, inverse, dataset.outputs)
    counts = np.bincount(inverse, minlength=len(first))
    means = sums / counts[:, None]

    by_first = np.argsort(first, kind="stable")
    keep = first[by_first]
    resolved = Dataset.from_arrays(
        dataset.inputs[keep],
        means[by_first],
        feature_names=dataset.feature_names,
        target_names=dataset.target_names,
        row_ids=dataset.row_ids[keep],
    )
    logger.info(f"Resolved duplicates: {dataset.n} rows -> {resolved.n} rows")
    return resolved
