"""Simple undirected graphs, ground-truth labels, partitions and their file formats.

File formats (UTF-8, ``#`` starts a comment line, node ids are 1-based):

* edge list: one ``u v`` pair per line, whitespace separated
* labels: ``node<TAB>label``; the label ``-`` marks an unlabeled node
* partition: ``node<TAB>community``
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import CoverageError, DataError, ParseError

UNLABELED = "-"


def _open_text(source):
    """Accept a path, an open text stream, or a string holding the file contents."""
    if isinstance(source, Path):
        return open(source, encoding="utf-8")
    if isinstance(source, str):
        if "\n" not in source and source and Path(source).is_file():
            return open(source, encoding="utf-8")
        return io.StringIO(source)
    return source


def _content_lines(source):
    stream = _open_text(source)
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line
    finally:
        if stream is not source:
            stream.close()


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise DataError(f"negative node count {self.n}")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise DataError(f"self-loop on node {u + 1}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DataError(f"edge ({u + 1},{v + 1}) outside 1..{self.n}")
            norm.add(_edge(u, v))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def load_edge_list(source, n: int | None = None) -> Graph:
    """Parse a 1-based edge list.

    The node count is the largest id seen unless ``n`` is given, in which case
    isolated trailing nodes are kept. Both orientations and repeated lines
    collapse to a single edge.
    """
    edges = set()
    max_id = 0
    for lineno, line in _content_lines(source):
        parts = line.split()
        if len(parts) < 2:
            raise ParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", lineno) from None
        if u < 1 or v < 1:
            raise ParseError(f"node ids are 1-based, got {line!r}", lineno)
        if u == v:
            raise ParseError(f"self-loop on node {u}", lineno)
        edges.add(_edge(u - 1, v - 1))
        max_id = max(max_id, u, v)
    if n is None:
        n = max_id
    elif n < max_id:
        raise DataError(f"edge list references node {max_id} but n={n}")
    return Graph(n, frozenset(edges))


def write_edge_list(g: Graph, dest) -> None:
    lines = [f"{u + 1} {v + 1}\n" for u, v in g.sorted_edges()]
    _write(dest, f"# n={g.n} m={g.num_edges}\n" + "".join(lines))


def adjacency(g: Graph) -> np.ndarray:
    """Dense adjacency matrix with a unit diagonal."""
    a = np.eye(g.n)
    if g.edges:
        idx = np.array(sorted(g.edges))
        a[idx[:, 0], idx[:, 1]] = 1.0
        a[idx[:, 1], idx[:, 0]] = 1.0
    return a


@dataclass(frozen=True)
class GroundTruth:
    """Community labels for a subset of nodes (0-based ids -> label string)."""

    labels: Mapping[int, str]

    @property
    def labeled(self) -> list[int]:
        return sorted(self.labels)

    def __len__(self):
        return len(self.labels)

    def check_range(self, n: int) -> None:
        bad = [v for v in self.labels if not 0 <= v < n]
        if bad:
            raise DataError(f"labeled node {min(bad) + 1} outside 1..{n}")

    def codes(self, nodes=None) -> np.ndarray:
        """Integer community codes for ``nodes`` (default: all labeled nodes, sorted)."""
        nodes = self.labeled if nodes is None else nodes
        names = sorted(set(self.labels.values()), key=_label_key)
        index = {name: i for i, name in enumerate(names)}
        return np.array([index[self.labels[v]] for v in nodes], dtype=int)

    def communities(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for v in self.labeled:
            out.setdefault(self.labels[v], []).append(v)
        return out

    @classmethod
    def from_assignment(cls, assign: Iterable[int]) -> "GroundTruth":
        return cls({i: str(int(c) + 1) for i, c in enumerate(assign)})


def _label_key(name: str):
    # numeric labels sort numerically, others lexically after them
    try:
        return (0, int(name), "")
    except ValueError:
        return (1, 0, name)


def load_labels(source) -> GroundTruth:
    labels: dict[int, str] = {}
    seen = set()
    for lineno, line in _content_lines(source):
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) < 2:
            raise ParseError(f"expected 'node<TAB>label', got {line!r}", lineno)
        try:
            node = int(parts[0])
        except ValueError:
            raise ParseError(f"non-integer node id {parts[0]!r}", lineno) from None
        if node < 1:
            raise ParseError(f"node ids are 1-based, got {node}", lineno)
        if node in seen:
            raise ParseError(f"duplicate row for node {node}", lineno)
        seen.add(node)
        label = parts[1].strip()
        if label != UNLABELED:
            labels[node - 1] = label
    return GroundTruth(labels)


def write_labels(gt: GroundTruth, dest, n: int | None = None) -> None:
    """Write labels; with ``n`` given, unlabeled nodes are written as ``-``."""
    nodes = range(n) if n is not None else gt.labeled
    rows = [f"{v + 1}\t{gt.labels.get(v, UNLABELED)}\n" for v in nodes]
    _write(dest, "".join(rows))


@dataclass(frozen=True)
class Partition:
    """Hard assignment of nodes ``0..n-1`` to community indices."""

    assign: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.assign, dtype=int)
        arr.setflags(write=False)
        object.__setattr__(self, "assign", arr)

    @property
    def n(self) -> int:
        return len(self.assign)

    @property
    def num_communities(self) -> int:
        return len(np.unique(self.assign))

    def communities(self) -> list[list[int]]:
        return [np.flatnonzero(self.assign == c).tolist() for c in np.unique(self.assign)]

    def restrict(self, nodes) -> np.ndarray:
        return self.assign[np.asarray(nodes, dtype=int)]

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.assign, other.assign)

    def __hash__(self):
        return hash(self.assign.tobytes())


def write_partition(p: Partition, dest) -> None:
    _write(dest, "".join(f"{i + 1}\t{c}\n" for i, c in enumerate(p.assign)))


def load_partition(source, n: int | None = None) -> Partition:
    """Read a ``node<TAB>community`` file.

    Integer community ids are kept as-is; any other tokens are numbered in
    sorted order. With ``n`` given every node ``1..n`` must appear.
    """
    rows: dict[int, str] = {}
    for lineno, line in _content_lines(source):
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) < 2:
            raise ParseError(f"expected 'node<TAB>community', got {line!r}", lineno)
        try:
            node = int(parts[0])
        except ValueError:
            raise ParseError(f"non-integer node id {parts[0]!r}", lineno) from None
        if node < 1:
            raise ParseError(f"node ids are 1-based, got {node}", lineno)
        if node in rows:
            raise ParseError(f"duplicate row for node {node}", lineno)
        rows[node - 1] = parts[1].strip()
    size = n if n is not None else (max(rows) + 1 if rows else 0)
    missing = [v + 1 for v in range(size) if v not in rows]
    if missing:
        shown = ", ".join(map(str, missing[:10]))
        raise CoverageError(f"partition is missing node(s) {shown}", missing)
    extra = [v + 1 for v in rows if v >= size]
    if extra:
        raise CoverageError(f"partition lists node {min(extra)} outside 1..{size}")
    tokens = [rows[v] for v in range(size)]
    try:
        assign = [int(t) for t in tokens]
    except ValueError:
        names = {t: i for i, t in enumerate(sorted(set(tokens)))}
        assign = [names[t] for t in tokens]
    return Partition(np.array(assign, dtype=int))


def _write(dest, text: str) -> None:
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text)
