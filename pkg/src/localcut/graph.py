"""Weighted undirected graphs in compressed adjacency form, plus cut quantities."""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class GraphFormatError(ValueError):
    """Raised when an edge list cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Immutable weighted undirected graph.

    Vertices are ``0..n-1``. ``labels[i]`` is the external id of vertex ``i``
    (identity for generated graphs). Adjacency is stored in CSR form with
    both directions of every edge present.
    """

    __slots__ = ("n", "indptr", "indices", "weights", "degree", "labels", "_adj", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]], labels: Sequence[int] | None = None):
        edges = list(edges)
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        us = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
        vs = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
        ws = np.fromiter((e[2] for e in edges), dtype=np.float64, count=len(edges))
        if len(edges):
            if us.min() < 0 or vs.min() < 0 or us.max() >= n or vs.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(us == vs):
                raise ValueError("self-loops are not allowed")
            if np.any(~(ws > 0)) or not np.all(np.isfinite(ws)):
                raise ValueError("edge weights must be positive and finite")
            lo, hi = np.minimum(us, vs), np.maximum(us, vs)
            keys = lo * n + hi
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edge")
        else:
            lo = hi = us
        adj = sp.csr_matrix(
            (np.concatenate([ws, ws]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
            shape=(n, n),
        )
        adj.sort_indices()
        self.n = n
        self._adj = adj
        self.indptr = adj.indptr
        self.indices = adj.indices
        self.weights = adj.data
        self.degree = np.asarray(adj.sum(axis=1)).ravel()
        order = np.lexsort((hi, lo))
        self._edges = (lo[order], hi[order], ws[order])
        self.labels = np.arange(n, dtype=np.int64) if labels is None else np.asarray(labels, dtype=np.int64)
        if self.labels.shape != (n,):
            raise ValueError("labels must have one entry per vertex")
        for arr in (self.indptr, self.indices, self.weights, self.degree, self.labels):
            arr.flags.writeable = False

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adj

    @property
    def total_volume(self) -> float:
        return float(self.degree.sum())

    @property
    def edge_count(self) -> int:
        return int(self._edges[0].size)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Undirected edges as ``(u, v, w)`` arrays with ``u < v``, sorted."""
        return self._edges

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def vertex_set(self, members: Iterable[int]) -> np.ndarray:
        """Validate ``members`` and return them as a sorted duplicate-free array."""
        arr = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray) else members, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= self.n):
            raise ValueError("vertex out of range")
        return arr

    def mask(self, members: Iterable[int]) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[self.vertex_set(members)] = True
        return m

    def volume(self, members: Iterable[int]) -> float:
        return float(self.degree[self.vertex_set(members)].sum())

    def index_of(self, label: int) -> int:
        hits = np.flatnonzero(self.labels == label)
        if hits.size == 0:
            raise KeyError(f"no vertex with id {label}")
        return int(hits[0])

    def digest(self) -> str:
        return hashlib.sha256(write_edge_list(self).encode()).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        a, b = self._edges, other._edges
        return (
            self.n == other.n
            and np.array_equal(self.labels, other.labels)
            and all(np.array_equal(x, y) for x, y in zip(a, b))
        )

    def __hash__(self) -> int:
        return hash(self.digest())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count}, volume={self.total_volume:g})"


def parse_edge_list(text: str | bytes) -> Graph:
    """Parse ``u v [w]`` lines into a graph.

    Blank lines and ``#`` comments are ignored. Vertex ids are compacted to
    ``0..n-1`` in increasing id order; the originals are kept in ``labels``.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    raw: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"expected 'u v [w]', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"vertex ids must be integers: {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError("vertex ids must be nonnegative", lineno)
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"bad weight {parts[2]!r}", lineno) from None
            if not (w > 0) or not np.isfinite(w):
                raise GraphFormatError(f"weight must be positive, got {parts[2]}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop on vertex {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key[0]} {key[1]}", lineno)
        seen.add(key)
        raw.append((u, v, w))
    if not raw:
        raise GraphFormatError("edge list is empty")
    labels = sorted({x for u, v, _ in raw for x in (u, v)})
    index = {lab: i for i, lab in enumerate(labels)}
    return Graph(len(labels), ((index[u], index[v], w) for u, v, w in raw), labels=labels)


def write_edge_list(g: Graph) -> str:
    """Canonical writer: sorted ``u v w`` lines using external ids, ``w`` omitted when 1."""
    lo, hi, ws = g.edges()
    a, b = g.labels[lo], g.labels[hi]
    rows = sorted(zip(np.minimum(a, b).tolist(), np.maximum(a, b).tolist(), ws.tolist()))
    out = []
    for u, v, w in rows:
        out.append(f"{u} {v}" if w == 1.0 else f"{u} {v} {w!r}")
    return "".join(line + "\n" for line in out)


# -- generators ----------------------------------------------------------------


def _clique_edges(vertices: Sequence[int], weight: float = 1.0) -> list[tuple[int, int, float]]:
    return [(vertices[i], vertices[j], weight) for i in range(len(vertices)) for j in range(i + 1, len(vertices))]


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def complete(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    return Graph(n, _clique_edges(range(n)))


def dumbbell(k: int) -> Graph:
    """Two ``K_k`` cliques, ``0..k-1`` and ``k..2k-1``, bridged by the edge ``(k-1, k)``."""
    if k < 2:
        raise ValueError("dumbbell needs k >= 2")
    edges = _clique_edges(range(k)) + _clique_edges(range(k, 2 * k))
    edges.append((k - 1, k, 1.0))
    return Graph(2 * k, edges)


def ring_of_cliques(r: int, k: int, bridge_weight: float = 1.0) -> Graph:
    """``r`` copies of ``K_k`` in a ring; clique ``i``'s last vertex links to clique ``i+1``'s first."""
    if r < 2 or k < 2:
        raise ValueError("ring_of_cliques needs r >= 2 and k >= 2")
    edges = []
    for c in range(r):
        edges += _clique_edges(range(c * k, (c + 1) * k))
        edges.append((c * k + k - 1, ((c + 1) % r) * k, bridge_weight))
    return Graph(r * k, edges)


def disjoint_cliques(r: int, k: int) -> Graph:
    if r < 1 or k < 2:
        raise ValueError("disjoint_cliques needs r >= 1 and k >= 2")
    edges = []
    for c in range(r):
        edges += _clique_edges(range(c * k, (c + 1) * k))
    return Graph(r * k, edges)


GENERATORS = {
    "cycle": cycle,
    "complete": complete,
    "dumbbell": dumbbell,
    "ring_of_cliques": ring_of_cliques,
    "disjoint_cliques": disjoint_cliques,
}


def generate(kind: str, *args, **kwargs) -> Graph:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}") from None
    return fn(*args, **kwargs)


# -- cut quantities ------------------------------------------------------------


def boundary(g: Graph, members: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in the set."""
    inside = g.mask(members)
    lo, hi, ws = g.edges()
    return float(ws[inside[lo] != inside[hi]].sum())


def conductance(g: Graph, members: Iterable[int]) -> tuple[float, float, float]:
    """Return ``(volume, boundary, phi)`` with ``phi = boundary / volume``."""
    s = g.vertex_set(members)
    if s.size == 0:
        raise ValueError("conductance of the empty set is undefined")
    vol = float(g.degree[s].sum())
    bd = boundary(g, s)
    return vol, bd, bd / vol


def stationary(g: Graph, members: Iterable[int] | None = None) -> np.ndarray:
    """Degree-proportional distribution restricted to the set (all of ``V`` by default)."""
    p = np.zeros(g.n)
    if members is None:
        p[:] = g.degree
    else:
        s = g.vertex_set(members)
        if s.size == 0:
            raise ValueError("stationary distribution of the empty set is undefined")
        p[s] = g.degree[s]
    return p / p.sum()


def components(g: Graph) -> list[np.ndarray]:
    from scipy.sparse.csgraph import connected_components

    count, lab = connected_components(g.adjacency, directed=False)
    return [np.flatnonzero(lab == c) for c in range(count)]
