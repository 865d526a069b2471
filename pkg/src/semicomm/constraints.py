"""Pairwise must-link / cannot-link constraints and their logical closure."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ContradictionError, DataError, ParseError
from .graph import GroundTruth, _content_lines, _write

BOTH, ML_ONLY, CL_ONLY = "both", "ml_only", "cl_only"
MODES = (BOTH, ML_ONLY, CL_ONLY)


def _pairs(pairs: Iterable, n: int, kind: str) -> frozenset:
    out = set()
    for i, j in pairs:
        i, j = int(i), int(j)
        if i == j:
            raise DataError(f"{kind} pair on a single node {i + 1}")
        if not (0 <= i < n and 0 <= j < n):
            raise DataError(f"{kind} pair ({i + 1},{j + 1}) outside 1..{n}")
        out.add((i, j) if i < j else (j, i))
    return frozenset(out)


@dataclass(frozen=True)
class ConstraintSet:
    """Unordered node pairs known to be must-link (``ml``) or cannot-link (``cl``).

    Pairs are stored as ``(i, j)`` with ``i < j``. A pair listed under both
    kinds is accepted here and reported by :func:`check_consistency`.
    """

    n: int
    ml: frozenset = field(default_factory=frozenset)
    cl: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "ml", _pairs(self.ml, self.n, "ML"))
        object.__setattr__(self, "cl", _pairs(self.cl, self.n, "CL"))

    def __len__(self):
        return len(self.ml) + len(self.cl)

    def pairs_of(self, node: int) -> tuple[list[int], list[int]]:
        """Partners of ``node`` in ML and CL pairs, sorted."""
        ml = sorted(j if i == node else i for i, j in self.ml if node in (i, j))
        cl = sorted(j if i == node else i for i, j in self.cl if node in (i, j))
        return ml, cl


@dataclass(frozen=True)
class ClosureReport:
    """Summary of the closure computed by :func:`enhance`.

    ``ml_classes`` lists every node set that takes part in a constraint:
    ML equivalence classes plus singleton classes for nodes that only appear
    in CL pairs. ``class_cl`` holds index pairs into ``ml_classes``.
    """

    ml_classes: list
    class_cl: frozenset
    added_ml: int
    added_cl: int


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def _ml_forest(s: ConstraintSet) -> _DisjointSet:
    ds = _DisjointSet(s.n)
    for i, j in s.ml:
        ds.union(i, j)
    return ds


def check_consistency(s: ConstraintSet) -> list[tuple[int, int, int]]:
    """Return witness triples ``(i, t, k)`` for every contradiction; empty if consistent.

    A contradiction is a CL pair ``(t, k)`` whose endpoints fall in the same
    ML class. ``i`` is the smallest member of that class, so that ``i~t`` and
    ``i~k`` are both must-link (possibly trivially, when ``i`` is ``t``).
    """
    ds = _ml_forest(s)
    smallest: dict[int, int] = {}
    for v in range(s.n):
        smallest.setdefault(ds.find(v), v)
    out = []
    for t, k in sorted(s.cl):
        root = ds.find(t)
        if root == ds.find(k):
            out.append((smallest[root], t, k))
    return out


def enhance(s: ConstraintSet) -> tuple[ConstraintSet, ClosureReport]:
    """Close ``s`` under the two inference rules.

    1. ``i~t`` ML and ``i~k`` ML  =>  ``t~k`` ML
    2. ``i~t`` ML and ``i~k`` CL  =>  ``t~k`` CL

    ML classes come from a disjoint-set forest; a CL pair between two classes
    makes every cross pair CL. Two CL pairs imply nothing.
    """
    conflicts = check_consistency(s)
    if conflicts:
        raise ContradictionError(conflicts)

    ds = _ml_forest(s)
    touched = {v for pair in itertools.chain(s.ml, s.cl) for v in pair}
    groups: dict[int, list[int]] = {}
    for v in sorted(touched):
        groups.setdefault(ds.find(v), []).append(v)
    classes = sorted(groups.values(), key=lambda c: c[0])
    class_of = {}
    for idx, members in enumerate(classes):
        for v in members:
            class_of[v] = idx

    ml = set()
    for members in classes:
        ml.update(itertools.combinations(members, 2))

    class_cl = set()
    for i, j in s.cl:
        a, b = class_of[i], class_of[j]
        class_cl.add((a, b) if a < b else (b, a))
    cl = set()
    for a, b in class_cl:
        for p in classes[a]:
            for q in classes[b]:
                cl.add((p, q) if p < q else (q, p))

    out = ConstraintSet(s.n, frozenset(ml), frozenset(cl))
    report = ClosureReport(
        ml_classes=[frozenset(c) for c in classes],
        class_cl=frozenset(class_cl),
        added_ml=len(out.ml) - len(s.ml),
        added_cl=len(out.cl) - len(s.cl),
    )
    return out, report


def filter_constraints(s: ConstraintSet, mode: str = BOTH) -> ConstraintSet:
    if mode == BOTH:
        return s
    if mode == ML_ONLY:
        return ConstraintSet(s.n, s.ml, frozenset())
    if mode == CL_ONLY:
        return ConstraintSet(s.n, frozenset(), s.cl)
    raise ValueError(f"unknown filter mode {mode!r}; expected one of {MODES}")


def target_count(fraction: float, m: int) -> int:
    """Number of pairs to sample: ``fraction * m(m-1)/2`` rounded half up."""
    total = m * (m - 1) // 2
    return int(np.floor(fraction * total + 0.5))


def sample_constraints(gt: GroundTruth, fraction: float, seed, n: int | None = None) -> ConstraintSet:
    """Sample pairs of labeled nodes uniformly without replacement.

    Each sampled pair becomes ML when both nodes share a label and CL otherwise.
    ``seed`` may be an int or a :class:`numpy.random.Generator`.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    nodes = np.array(gt.labeled, dtype=int)
    m = len(nodes)
    if n is None:
        n = int(nodes.max()) + 1 if m else 0
    if m < 2:
        if fraction == 0:
            return ConstraintSet(n)
        raise DataError(f"need at least 2 labeled nodes to sample pairs, got {m}")
    count = target_count(fraction, m)
    rng = np.random.default_rng(seed)
    total = m * (m - 1) // 2
    picks = np.sort(rng.choice(total, size=count, replace=False))
    rows, cols = np.triu_indices(m, 1)
    a, b = nodes[rows[picks]], nodes[cols[picks]]
    codes = gt.codes(nodes)
    same = codes[rows[picks]] == codes[cols[picks]]
    ml = frozenset(zip(a[same].tolist(), b[same].tolist()))
    cl = frozenset(zip(a[~same].tolist(), b[~same].tolist()))
    return ConstraintSet(n, ml, cl)


def load_constraints(source, n: int | None = None) -> ConstraintSet:
    """Read ``i<TAB>j<TAB>ML|CL`` lines (1-based ids)."""
    ml, cl = set(), set()
    max_id = 0
    for lineno, line in _content_lines(source):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'i<TAB>j<TAB>ML|CL', got {line!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", lineno) from None
        if i < 1 or j < 1:
            raise ParseError("node ids are 1-based", lineno)
        if i == j:
            raise ParseError(f"constraint on a single node {i}", lineno)
        kind = parts[2].upper()
        if kind not in ("ML", "CL"):
            raise ParseError(f"constraint kind must be ML or CL, got {parts[2]!r}", lineno)
        (ml if kind == "ML" else cl).add((i - 1, j - 1))
        max_id = max(max_id, i, j)
    if n is None:
        n = max_id
    elif n < max_id:
        raise DataError(f"constraint references node {max_id} but n={n}")
    return ConstraintSet(n, frozenset(ml), frozenset(cl))


def write_constraints(s: ConstraintSet, dest) -> None:
    rows = [(i, j, "ML") for i, j in s.ml] + [(i, j, "CL") for i, j in s.cl]
    rows.sort()
    _write(dest, "".join(f"{i + 1}\t{j + 1}\t{kind}\n" for i, j, kind in rows))
