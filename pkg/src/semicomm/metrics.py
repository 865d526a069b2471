"""Partition agreement: normalized mutual information and misclustered-node reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DataError
from .graph import GroundTruth, Partition


def _labels(p) -> np.ndarray:
    if isinstance(p, Partition):
        return p.assign
    return np.asarray(p)


@dataclass(frozen=True)
class ConfusionTable:
    """``counts[i, j]`` = nodes in cluster ``i`` of the first partition and ``j`` of the second."""

    counts: np.ndarray
    rows: np.ndarray
    cols: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def confusion_table(m1, m2) -> ConfusionTable:
    a, b = _labels(m1), _labels(m2)
    if a.shape != b.shape:
        raise DataError(f"partitions cover different node sets ({a.size} vs {b.size} nodes)")
    rows, ia = np.unique(a, return_inverse=True)
    cols, ib = np.unique(b, return_inverse=True)
    counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
    np.add.at(counts, (ia, ib), 1)
    return ConfusionTable(counts, rows, cols)


def nmi(m1, m2) -> float:
    """Normalized mutual information with the geometric-mean normalization.

    Works on ``k1 x k2`` tables of any shape. Returns 0 when either partition
    consists of a single cluster, where the normalizer vanishes.
    """
    t = confusion_table(m1, m2)
    n = t.n
    if n == 0:
        raise DataError("cannot compare empty partitions")
    n1, n2 = t.row_sums, t.col_sums
    h1 = float(np.sum(n1 * np.log(n1 / n)))
    h2 = float(np.sum(n2 * np.log(n2 / n)))
    if h1 == 0.0 or h2 == 0.0:
        return 0.0
    nz = t.counts > 0
    nij = t.counts[nz].astype(float)
    outer = np.outer(n1, n2)[nz].astype(float)
    mutual = float(np.sum(nij * np.log(nij * n / outer)))
    return mutual / np.sqrt(h1 * h2)


def score(p: Partition, gt: GroundTruth) -> float:
    """NMI of ``p`` against ``gt`` over the labeled nodes only."""
    nodes = gt.labeled
    if nodes and max(nodes) >= p.n:
        raise DataError(f"partition covers {p.n} nodes but node {max(nodes) + 1} is labeled")
    return nmi(gt.codes(nodes), p.restrict(nodes))


def match_clusters(truth, found) -> dict[int, int]:
    """Agreement-maximizing one-to-one map from found cluster ids to true cluster ids."""
    t = confusion_table(found, truth)
    r, c = linear_sum_assignment(t.counts, maximize=True)
    return {int(t.rows[i]): int(t.cols[j]) for i, j in zip(r, c)}


def misclustered(p: Partition, gt: GroundTruth) -> list[int]:
    """Labeled nodes whose computed cluster maps to a different true community (1-based, sorted).

    Nodes in computed clusters left unmatched (more clusters than true
    communities) count as misclustered.
    """
    nodes = np.array(gt.labeled, dtype=int)
    if nodes.size == 0:
        return []
    if nodes.max() >= p.n:
        raise DataError(f"partition covers {p.n} nodes but node {nodes.max() + 1} is labeled")
    truth = gt.codes(nodes)
    found = p.restrict(nodes)
    mapping = match_clusters(truth, found)
    predicted = np.array([mapping.get(int(c), -1) for c in found])
    return sorted(int(v) + 1 for v in nodes[predicted != truth])
