"""Spectral clustering: normalized affinity, leading eigenvectors, row normalization, k-means."""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DataError, NumericError
from .graph import Partition

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100
RESIDUAL_TOL = 1e-8


class ZeroRowWarning(UserWarning):
    """An embedding row is zero and cannot be normalized."""


def normalized_affinity(b, exponent: float = -0.5) -> np.ndarray:
    """``D^e B D^e`` with ``D_ii`` the row sums of ``b`` (``e = -1/2`` by default)."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DataError(f"affinity must be square, got shape {b.shape}")
    d = b.sum(axis=1)
    bad = np.flatnonzero(d <= 0)
    if bad.size:
        raise DataError(f"nonpositive row sum at node(s) {', '.join(str(i + 1) for i in bad[:10])}")
    s = d**exponent
    out = s[:, None] * b * s[None, :]
    # exact symmetry regardless of rounding in the products above
    return 0.5 * (out + out.T)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        scale = np.abs(col).max()
        if scale == 0:
            continue
        first = np.flatnonzero(np.abs(col) > 1e-10 * scale)[0]
        if col[first] < 0:
            vecs[:, j] = -col
    return vecs


def top_k_eigenvectors(l, k: int, return_values: bool = False):
    """Unit eigenvectors for the ``k`` algebraically largest eigenvalues, largest first.

    Each column's first clearly nonzero entry is made positive. Raises
    :class:`NumericError` if any residual ``||Lx - lx||`` exceeds ``1e-8 * ||L||``.
    """
    l = np.asarray(l, dtype=float)
    n = l.shape[0]
    if l.ndim != 2 or l.shape[1] != n:
        raise DataError(f"expected a square matrix, got shape {l.shape}")
    if not 1 <= k <= n:
        raise DataError(f"k={k} must lie in 1..{n}")
    if not np.allclose(l, l.T, rtol=0, atol=1e-12 * max(1.0, np.abs(l).max())):
        raise DataError("matrix is not symmetric")
    try:
        vals, vecs = np.linalg.eigh(l)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver failed on a {n}x{n} matrix: {exc}") from exc
    order = np.argsort(-vals, kind="stable")[:k]
    vals = vals[order]
    vecs = _fix_signs(vecs[:, order].copy())
    norm = np.linalg.norm(l, 2) if n else 0.0
    resid = np.linalg.norm(l @ vecs - vecs * vals, axis=0)
    worst = float(resid.max()) if k else 0.0
    if worst > RESIDUAL_TOL * max(norm, 1.0):
        raise NumericError(
            f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL:g}*||L|| (||L||={norm:.3e})"
        )
    if return_values:
        return vals, vecs
    return vecs


def normalize_rows(x) -> np.ndarray:
    x = np.array(x, dtype=float, copy=True)
    norms = np.linalg.norm(x, axis=1)
    zero = norms == 0
    if zero.any():
        warnings.warn(
            f"{int(zero.sum())} zero embedding row(s) left at the origin",
            ZeroRowWarning,
            stacklevel=2,
        )
    x[~zero] /= norms[~zero, None]
    return x


def _sq_dists(points, centers):
    d = (
        np.einsum("ij,ij->i", points, points)[:, None]
        - 2.0 * points @ centers.T
        + np.einsum("ij,ij->i", centers, centers)[None, :]
    )
    return np.maximum(d, 0.0)


def _plusplus(points, k, rng):
    n = len(points)
    centers = [points[rng.integers(n)]]
    closest = _sq_dists(points, np.array(centers))[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers.append(points[idx])
        closest = np.minimum(closest, _sq_dists(points, points[idx : idx + 1])[:, 0])
    return np.array(centers)


def _repair_empty(points, labels, k):
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        big = int(np.argmax(counts))
        members = np.flatnonzero(labels == big)
        center = points[members].mean(axis=0)
        far = members[np.argmax(((points[members] - center) ** 2).sum(axis=1))]
        labels[far] = c
        counts[big] -= 1
        counts[c] += 1
    return labels


def _centroids(points, labels, k):
    centers = np.zeros((k, points.shape[1]))
    np.add.at(centers, labels, points)
    counts = np.bincount(labels, minlength=k)
    return centers / np.maximum(counts, 1)[:, None]


def _lloyd(points, k, rng, max_iter):
    centers = _plusplus(points, k, rng)
    labels = None
    for _ in range(max_iter):
        new = _repair_empty(points, np.argmin(_sq_dists(points, centers), axis=1), k)
        centers = _centroids(points, new, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
    sse = float(((points - centers[labels]) ** 2).sum())
    return labels, sse


def kmeans(points, k: int, seed=0, restarts: int = KMEANS_RESTARTS, max_iter: int = KMEANS_MAX_ITER) -> Partition:
    """Lloyd's algorithm from k-means++ seeding; best of ``restarts`` by within-cluster SSE.

    Restart ``r`` draws from ``default_rng([seed, r])`` so restarts are
    independent of each other and of execution order. An empty cluster takes
    the point farthest from the centroid of the currently largest cluster.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = len(points)
    if not 1 <= k <= n:
        raise DataError(f"k={k} must lie in 1..{n}")
    best, best_sse = None, np.inf
    for r in range(restarts):
        labels, sse = _lloyd(points, k, np.random.default_rng([int(seed), r]), max_iter)
        if sse < best_sse:
            best, best_sse = labels, sse
    return Partition(best)


def spectral_embedding(b, k: int, exponent: float = -0.5) -> np.ndarray:
    return normalize_rows(top_k_eigenvectors(normalized_affinity(b, exponent), k))


def spectral_cluster(b, k: int, seed=0, exponent: float = -0.5) -> Partition:
    return kmeans(spectral_embedding(b, k, exponent), k, seed=seed)
