"""Least-squares NMF with multiplicative updates, and community extraction from H."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Partition

EPS = 1e-12
DEFAULT_ITERS = 100


class DegenerateColumnWarning(UserWarning):
    """Some column of H is identically zero, so its node is assigned arbitrarily."""


@dataclass(frozen=True)
class Factorization:
    W: np.ndarray
    H: np.ndarray
    objective_trace: list

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]

    def partition(self) -> Partition:
        return assign_from_h(self.H)

    @property
    def realized_k(self) -> int:
        """Number of distinct communities actually used by the argmax assignment."""
        return self.partition().num_communities


def nmf(x, k: int, iters: int = DEFAULT_ITERS, seed=0, tol: float | None = None,
        restarts: int = 1) -> Factorization:
    """Factorize ``x ~ W @ H`` with the Lee-Seung multiplicative rules.

    W is updated first, then H, once per iteration. Denominators are clamped
    at ``EPS``. With ``tol`` set, iteration stops early once the relative
    decrease of the objective falls below it.

    With ``restarts > 1`` the factorization is repeated from independent
    uniform starts (restart ``r`` seeded by ``[seed, r]``) and the run with the
    lowest final objective is returned; ``restarts=1`` uses ``seed`` directly.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if restarts == 1:
        return _nmf_once(x, k, iters, seed, tol)
    best = None
    for r in range(restarts):
        f = _nmf_once(x, k, iters, [int(seed), r], tol)
        if best is None or f.objective < best.objective:
            best = f
    return best


def _nmf_once(x, k, iters, seed, tol) -> Factorization:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {x.shape}")
    if (x < 0).any():
        raise DataError("NMF input must be entrywise nonnegative")
    n, m = x.shape
    if k < 1 or k > min(n, m):
        raise DataError(f"community count k={k} must lie in 1..{min(n, m)}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")

    rng = np.random.default_rng(seed)
    # uniform on (0, 1]
    w = 1.0 - rng.random((n, k))
    h = 1.0 - rng.random((k, m))

    trace = []
    for _ in range(iters):
        w *= (x @ h.T) / np.maximum(w @ (h @ h.T), EPS)
        h *= (w.T @ x) / np.maximum((w.T @ w) @ h, EPS)
        resid = x - w @ h
        trace.append(float(np.einsum("ij,ij->", resid, resid)))
        if tol is not None and len(trace) > 1:
            prev = trace[-2]
            if prev - trace[-1] <= tol * max(prev, EPS):
                break
    return Factorization(w, h, trace)


def assign_from_h(h) -> Partition:
    """Node ``i`` joins the row holding the largest entry of column ``i``.

    ``np.argmax`` returns the first maximum, so ties go to the lowest index.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] < 1:
        raise DataError(f"H must have at least one row, got shape {h.shape}")
    dead = np.flatnonzero(~h.any(axis=0))
    if dead.size:
        shown = ", ".join(str(i + 1) for i in dead[:10])
        warnings.warn(
            f"{dead.size} all-zero column(s) in H (nodes {shown}); assigned to community 0",
            DegenerateColumnWarning,
            stacklevel=2,
        )
    return Partition(np.argmax(h, axis=0))


def nmf_partition(x, k: int, iters: int = DEFAULT_ITERS, seed=0, restarts: int = 1) -> Partition:
    return nmf(x, k, iters=iters, seed=seed, restarts=restarts).partition()
