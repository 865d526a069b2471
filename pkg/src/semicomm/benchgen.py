"""Benchmark graphs with planted communities: GN "four groups" and LFR."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError, GenerationError
from .graph import Graph, GroundTruth


@dataclass(frozen=True)
class GnParams:
    z_in: float = 6.0
    z_out: float = 10.0
    communities: int = 4
    size: int = 32

    @property
    def n(self) -> int:
        return self.communities * self.size

    @property
    def p_in(self) -> float:
        return self.z_in / (self.size - 1)

    @property
    def p_out(self) -> float:
        return self.z_out / (self.n - self.size)

    def validate(self) -> None:
        if self.communities < 2 or self.size < 2:
            raise DataError("GN needs at least 2 communities of at least 2 nodes")
        if self.z_in < 0 or self.z_out < 0:
            raise DataError("z_in and z_out must be nonnegative")
        if self.z_in > self.size - 1:
            raise DataError(f"z_in={self.z_in} exceeds the {self.size - 1} possible intra neighbors")
        if self.z_out > self.n - self.size:
            raise DataError(f"z_out={self.z_out} exceeds the {self.n - self.size} possible inter neighbors")


def generate_gn(p: GnParams, seed) -> tuple[Graph, GroundTruth]:
    """Planted partition: every pair is an independent Bernoulli draw.

    Intra pairs link with probability ``z_in/(size-1)`` and inter pairs with
    ``z_out/(n-size)``, so expected degrees are ``z_in`` and ``z_out``.
    """
    p.validate()
    rng = np.random.default_rng(seed)
    n = p.n
    block = np.repeat(np.arange(p.communities), p.size)
    rows, cols = np.triu_indices(n, 1)
    prob = np.where(block[rows] == block[cols], p.p_in, p.p_out)
    hit = rng.random(rows.size) < prob
    edges = frozenset(zip(rows[hit].tolist(), cols[hit].tolist()))
    return Graph(n, edges), GroundTruth.from_assignment(block)


@dataclass(frozen=True)
class LfrParams:
    n: int = 1000
    avg_deg: float = 20.0
    max_deg: int = 50
    gamma: float = 2.0
    beta: float = 1.0
    mu: float = 0.9
    min_comm: int | None = None
    max_comm: int | None = None
    max_sweeps: int = 100

    def resolved(self) -> "LfrParams":
        """Copy with community-size bounds filled in."""
        lo = self.min_comm
        if lo is None:
            lo = max(10, math.ceil((1 - self.mu) * self.avg_deg) + 1)
        hi = self.max_comm if self.max_comm is not None else 100
        hi = min(hi, self.n)
        lo = min(lo, hi)
        return LfrParams(self.n, self.avg_deg, self.max_deg, self.gamma, self.beta, self.mu,
                         lo, hi, self.max_sweeps)

    def validate(self) -> None:
        if not 0.0 <= self.mu <= 1.0:
            raise DataError(f"mu must lie in [0, 1], got {self.mu}")
        if self.n < 2:
            raise DataError("n must be at least 2")
        if not 1 <= self.avg_deg <= self.max_deg:
            raise DataError(f"need 1 <= avg_deg <= max_deg, got {self.avg_deg} and {self.max_deg}")
        if self.max_deg >= self.n:
            raise DataError(f"max_deg={self.max_deg} must be below n={self.n}")
        if self.min_comm is not None and self.max_comm is not None:
            if not 1 <= self.min_comm <= self.max_comm <= self.n:
                raise DataError(
                    f"need 1 <= min_comm <= max_comm <= n, got {self.min_comm}, {self.max_comm}"
                )
        if self.gamma <= 0 or self.beta < 0:
            raise DataError("exponents must satisfy gamma > 0 and beta >= 0")


def _power_law(lo: float, hi: int, exponent: float):
    """Integer support and probabilities for ``P(k) ~ k^-exponent`` on ``[lo, hi]``.

    ``lo`` may be fractional: the integer ``floor(lo)`` then keeps only the
    fraction ``1 - (lo - floor(lo))`` of its weight, which makes the mean a
    continuous increasing function of ``lo``.
    """
    base = math.floor(lo)
    ks = np.arange(base, hi + 1, dtype=float)
    w = ks**-exponent
    w[0] *= 1.0 - (lo - base)
    return ks.astype(int), w / w.sum()


def _mean(lo, hi, exponent):
    ks, p = _power_law(lo, hi, exponent)
    return float(ks @ p)


def calibrate_min_degree(avg_deg: float, max_deg: int, gamma: float) -> float:
    """Lower cutoff (possibly fractional) whose truncated power law has mean ``avg_deg``."""
    lo, hi = 1.0, float(max_deg)
    if not _mean(lo, max_deg, gamma) <= avg_deg <= max_deg:
        raise DataError(
            f"avg_deg={avg_deg} unreachable with max_deg={max_deg}, gamma={gamma} "
            f"(smallest attainable mean {_mean(lo, max_deg, gamma):.3f})"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _mean(mid, max_deg, gamma) < avg_deg:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


def _draw(rng, support, probs, size):
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return support[np.searchsorted(cdf, rng.random(size), side="right")]


def _community_sizes(rng, p: LfrParams, attempts: int = 1000) -> np.ndarray:
    support, probs = _power_law(p.min_comm, p.max_comm, p.beta)
    for _ in range(attempts):
        sizes = []
        total = 0
        while total < p.n:
            s = int(_draw(rng, support, probs, 1)[0])
            sizes.append(s)
            total += s
        sizes = np.array(sizes)
        excess = total - p.n
        slack = sizes - p.min_comm
        if excess > slack.sum():
            continue
        while excess:
            c = rng.choice(np.flatnonzero(sizes > p.min_comm))
            sizes[c] -= 1
            excess -= 1
        return sizes
    raise GenerationError(
        "could not draw community sizes summing to n",
        {"n": p.n, "min_comm": p.min_comm, "max_comm": p.max_comm, "attempts": attempts},
    )


def _assign_nodes(rng, k_in, sizes) -> np.ndarray:
    """Place nodes (largest internal degree first) into communities that can host them."""
    n = len(k_in)
    free = sizes.copy()
    comm = np.full(n, -1)
    for v in np.argsort(-k_in, kind="stable"):
        ok = np.flatnonzero((free > 0) & (sizes - 1 >= k_in[v]))
        if ok.size == 0:
            raise GenerationError(
                "no community can host a node's internal degree",
                {"node": int(v) + 1, "internal_degree": int(k_in[v]), "largest_community": int(sizes.max())},
            )
        c = rng.choice(ok, p=free[ok] / free[ok].sum())
        comm[v] = c
        free[c] -= 1
    return comm


def _fix_parity(rng, deg, k_in, comm, sizes, p: LfrParams):
    target = 1.0 - p.mu
    for c in range(len(sizes)):
        members = np.flatnonzero(comm == c)
        if k_in[members].sum() % 2 == 0:
            continue
        for v in rng.permutation(members):
            up_ok = k_in[v] + 1 <= sizes[c] - 1
            if p.mu == 0:
                # keep every stub internal: change the degree itself
                if up_ok and deg[v] < p.max_deg:
                    deg[v] += 1
                    k_in[v] += 1
                    break
                if deg[v] > 1:
                    deg[v] -= 1
                    k_in[v] -= 1
                    break
                continue
            can_up = up_ok and k_in[v] < deg[v]
            can_down = k_in[v] > 0
            want_up = k_in[v] < target * deg[v]
            if can_up and (want_up or not can_down):
                k_in[v] += 1
                break
            if can_down:
                k_in[v] -= 1
                break
        else:
            raise GenerationError("cannot repair internal stub parity", {"community": c + 1})
    ext = deg - k_in
    if ext.sum() % 2:
        cands = np.flatnonzero((deg < p.max_deg) & (p.mu > 0))
        if cands.size:
            v = rng.choice(cands)
            deg[v] += 1
        else:
            cands = np.flatnonzero(ext > 0)
            v = rng.choice(cands)
            deg[v] -= 1
    return deg, k_in


def _pair_stubs(rng, stubs):
    stubs = rng.permutation(stubs)
    return [[int(a), int(b)] for a, b in zip(stubs[0::2], stubs[1::2])]


def _key(u, v):
    return (u, v) if u < v else (v, u)


def _rewire(rng, edges, comm, internal: bool, max_sweeps: int):
    """Degree-preserving double-edge swaps until no edge in the pool is bad.

    Bad edges are self-loops, repeated edges and, for the external pool,
    edges joining two nodes of the same community. Returns the number of
    bad edges left.
    """
    counts = Counter(_key(u, v) for u, v in edges)

    def bad(e):
        u, v = e
        if u == v or counts[_key(u, v)] > 1:
            return True
        return (not internal) and comm[u] == comm[v]

    def good(u, v):
        if u == v or counts[_key(u, v)] > 0:
            return False
        return internal or comm[u] != comm[v]

    m = len(edges)
    for _ in range(max_sweeps):
        todo = [i for i in range(m) if bad(edges[i])]
        if not todo:
            return 0
        if m < 2:
            return len(todo)
        for i in todo:
            if not bad(edges[i]):
                continue
            for _try in range(10):
                j = int(rng.integers(m))
                if j == i:
                    continue
                a, b = edges[i]
                c, d = edges[j]
                if rng.random() < 0.5:
                    c, d = d, c
                counts[_key(a, b)] -= 1
                counts[_key(c, d)] -= 1
                if good(a, d) and good(c, b) and _key(a, d) != _key(c, b):
                    edges[i] = [a, d]
                    edges[j] = [c, b]
                    counts[_key(a, d)] += 1
                    counts[_key(c, b)] += 1
                    break
                counts[_key(a, b)] += 1
                counts[_key(c, d)] += 1
    return sum(1 for e in edges if bad(e))


def _havel_hakimi(rng, nodes, degrees):
    """Simple graph on ``nodes`` with the given degrees, built greedily.

    Exact whenever the sequence is graphical. Otherwise the stubs that could
    not be matched are returned as a flat node list. Ties are broken at random.
    """
    rest = {int(v): int(d) for v, d in zip(nodes, degrees)}
    tiebreak = {v: float(r) for v, r in zip(rest, rng.random(len(rest)))}
    edges, left = [], []
    while True:
        live = [v for v in rest if rest[v] > 0]
        if not live:
            return edges, left
        live.sort(key=lambda v: (-rest[v], tiebreak[v]))
        v, d = live[0], rest[live[0]]
        targets = live[1:d + 1]
        for u in targets:
            edges.append([v, u])
            rest[u] -= 1
        left.extend([v] * (d - len(targets)))
        rest[v] = 0


def _shuffle_edges(rng, edges, sweeps: int):
    """Random degree-preserving double-edge swaps that keep the graph simple."""
    present = {_key(u, v) for u, v in edges}
    m = len(edges)
    if m < 2:
        return
    for _ in range(sweeps * m):
        i, j = rng.integers(m, size=2)
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        if a == d or c == b or _key(a, d) in present or _key(c, b) in present or _key(a, d) == _key(c, b):
            continue
        present -= {_key(a, b), _key(c, d)}
        present |= {_key(a, d), _key(c, b)}
        edges[i] = [a, d]
        edges[j] = [c, b]


def generate_lfr(p: LfrParams, seed) -> tuple[Graph, GroundTruth]:
    """LFR benchmark graph with non-overlapping communities.

    Degrees follow a truncated power law (exponent ``gamma``, upper cutoff
    ``max_deg``, lower cutoff calibrated so the mean is ``avg_deg``).
    Community sizes follow a power law with exponent ``beta``. Each node gets
    ``round((1 - mu) * k)`` internal stubs; stubs are matched at random within
    communities and across the whole graph, then rewired.
    """
    p.validate()
    p = p.resolved()
    p.validate()
    rng = np.random.default_rng(seed)

    kmin = calibrate_min_degree(p.avg_deg, p.max_deg, p.gamma)
    support, probs = _power_law(kmin, p.max_deg, p.gamma)
    deg = _draw(rng, support, probs, p.n).astype(int)
    k_in = np.floor((1.0 - p.mu) * deg + 0.5).astype(int)

    sizes = _community_sizes(rng, p)
    comm = _assign_nodes(rng, k_in, sizes)
    deg, k_in = _fix_parity(rng, deg, k_in, comm, sizes, p)

    edges = []
    spill = []
    for c in range(len(sizes)):
        members = np.flatnonzero(comm == c)
        stubs = np.repeat(members, k_in[members])
        pool = _pair_stubs(rng, stubs)
        if _rewire(rng, pool, comm, internal=True, max_sweeps=p.max_sweeps):
            # dense communities defeat random pairing; build deterministically, then shuffle
            pool, left = _havel_hakimi(rng, members, k_in[members])
            _shuffle_edges(rng, pool, sweeps=10)
            # stubs of a non-graphical internal sequence go to the external pool
            spill.extend(left)
        edges.extend(pool)
    ext = deg - k_in
    stubs = np.concatenate([np.repeat(np.arange(p.n), ext), np.array(spill, dtype=int)])
    pool = _pair_stubs(rng, stubs)
    rest = _rewire(rng, pool, comm, internal=False, max_sweeps=p.max_sweeps)
    if rest:
        raise GenerationError(
            f"rewiring left invalid edges after {p.max_sweeps} sweeps",
            {"invalid_external": rest, "spilled_internal": len(spill) // 2,
             "mu": p.mu, "communities": len(sizes)},
        )
    edges.extend(pool)
    g = Graph(p.n, frozenset(_key(u, v) for u, v in edges))
    return g, GroundTruth.from_assignment(comm)


def mixing_fractions(g: Graph, gt: GroundTruth) -> np.ndarray:
    """Per-node fraction of neighbors outside the node's own community (NaN for isolated nodes)."""
    codes = gt.codes(range(g.n))
    out = np.zeros(g.n)
    deg = np.zeros(g.n)
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
        if codes[u] != codes[v]:
            out[u] += 1
            out[v] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(deg > 0, out / deg, np.nan)
