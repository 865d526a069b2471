"""Objective matrices built from the adjacency matrix and pairwise constraints."""

from __future__ import annotations

import enum

import numpy as np

from .constraints import CL_ONLY, ML_ONLY, ConstraintSet, enhance, filter_constraints
from .errors import DataError

DEFAULT_ALPHA = 2.0


class Variant(str, enum.Enum):
    A = "A"
    B1 = "B1"
    B2 = "B2"
    B1_ML = "B1_ML"
    B1_CL = "B1_CL"
    B2_ML = "B2_ML"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name) -> "Variant":
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown variant {name!r}; expected one of {[v.value for v in cls]}"
            ) from None

    @property
    def enhanced(self) -> bool:
        return self in (Variant.B2, Variant.B2_ML)


def _index(pairs, n):
    if not pairs:
        return None
    idx = np.fromiter((v for p in pairs for v in p), dtype=np.int64, count=2 * len(pairs))
    idx = idx.reshape(-1, 2)
    if idx.min() < 0 or idx.max() >= n:
        raise DataError(f"constraint pair outside 0..{n - 1}")
    return idx


def revise(a: np.ndarray, s: ConstraintSet, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Overwrite ML entries of ``a`` with ``alpha`` and CL entries with 0."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    n = a.shape[0]
    if s.n > n:
        raise DataError(f"constraints cover {s.n} nodes but the matrix has {n}")
    out = np.array(a, dtype=float, copy=True)
    ml = _index(s.ml, n)
    if ml is not None:
        out[ml[:, 0], ml[:, 1]] = alpha
        out[ml[:, 1], ml[:, 0]] = alpha
    cl = _index(s.cl, n)
    if cl is not None:
        out[cl[:, 0], cl[:, 1]] = 0.0
        out[cl[:, 1], cl[:, 0]] = 0.0
    return out


def variant_constraints(s: ConstraintSet, v) -> tuple[ConstraintSet, ConstraintSet]:
    """Constraint set a variant writes into the matrix, before and after closure."""
    v = Variant.parse(v)
    if v is Variant.A:
        empty = ConstraintSet(s.n)
        return empty, empty
    if v in (Variant.B1_ML, Variant.B2_ML):
        base = filter_constraints(s, ML_ONLY)
    elif v is Variant.B1_CL:
        base = filter_constraints(s, CL_ONLY)
    else:
        base = s
    if v.enhanced:
        closed, _ = enhance(base)
        return base, closed
    return base, base


def build_variant(a: np.ndarray, s: ConstraintSet, v, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    v = Variant.parse(v)
    if v is Variant.A:
        return np.array(a, dtype=float, copy=True)
    _, used = variant_constraints(s, v)
    return revise(a, used, alpha)


def dump_matrix(m: np.ndarray, dest) -> None:
    """Write a dense matrix as TSV rows (debugging and golden files)."""
    text = "".join("\t".join(f"{x:g}" for x in row) + "\n" for row in m)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_matrix(source) -> np.ndarray:
    rows = []
    with open(source, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append([float(x) for x in line.split("\t")])
    return np.array(rows)
