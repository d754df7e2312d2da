"""Lazy random walks: one-step propagation, restricted remain probabilities, sampling."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np
import scipy.sparse as sp

from .graph import Graph, conductance

DEFAULT_CORE_CONSTANT = 1.0 / 200.0


class WalkOperator:
    """Transition operator of the (lazy) random walk on ``g``.

    ``lazy=True`` gives ``(I + D^-1 A) / 2``; ``lazy=False`` gives ``D^-1 A``.
    Distributions are dense row vectors of length ``n``.
    """

    def __init__(self, g: Graph, lazy: bool = True):
        if np.any(g.degree <= 0):
            raise ValueError("walk operator needs every vertex to have an incident edge")
        self.graph = g
        self.lazy = lazy
        inv = sp.diags(1.0 / g.degree)
        walk = (inv @ g.adjacency).tocsr()
        self.matrix = (0.5 * (sp.identity(g.n, format="csr") + walk)).tocsr() if lazy else walk
        # running sum of CSR weights; row v's neighbors occupy one contiguous slice
        self._gcum = np.cumsum(g.weights)

    def step(self, p: np.ndarray) -> np.ndarray:
        if np.any(p < 0):
            raise ValueError("distribution has negative mass")
        return self.matrix.T @ p

    def point_mass(self, v: int) -> np.ndarray:
        p = np.zeros(self.graph.n)
        p[v] = 1.0
        return p

    def walk_distributions(self, v: int, steps: int) -> list[np.ndarray]:
        """``[1_v, 1_v G, ..., 1_v G^steps]``."""
        ps = [self.point_mass(v)]
        for _ in range(steps):
            ps.append(self.step(ps[-1]))
        return ps

    def restricted(self, members: Iterable[int]) -> sp.csr_matrix:
        """``I_S G I_S`` compressed to the rows and columns of ``S`` (in sorted order)."""
        s = self.graph.vertex_set(members)
        return self.matrix[s][:, s].tocsr()

    # sampling

    def advance_many(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One independent walk step from each position in ``x``."""
        g = self.graph
        x = np.asarray(x, dtype=np.int64)
        lo, hi = g.indptr[x], g.indptr[x + 1]
        base = np.where(lo > 0, self._gcum[lo - 1], 0.0)
        target = base + rng.random(x.size) * (self._gcum[hi - 1] - base)
        moved = g.indices[np.clip(np.searchsorted(self._gcum, target, side="right"), lo, hi - 1)]
        if not self.lazy:
            return moved
        return np.where(rng.random(x.size) < 0.5, x, moved)

    def _move(self, v: int, u: float) -> int:
        g = self.graph
        lo, hi = g.indptr[v], g.indptr[v + 1]
        base = self._gcum[lo - 1] if lo > 0 else 0.0
        target = base + u * (self._gcum[hi - 1] - base)
        j = min(max(int(np.searchsorted(self._gcum, target, side="right")), lo), hi - 1)
        return int(g.indices[j])


def lazy_step(op: WalkOperator, p: np.ndarray) -> np.ndarray:
    return op.step(p)


def remain_vector(op: WalkOperator, members: Iterable[int], t: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(S, rem)`` where ``rem[i]`` is the probability a ``t``-step walk from ``S[i]`` stays in ``S``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    s = op.graph.vertex_set(members)
    if s.size == 0:
        raise ValueError("empty set")
    m = op.restricted(s)
    r = np.ones(s.size)
    for _ in range(t):
        r = m @ r
    return s, r


def remain_probability(op: WalkOperator, v: int, t: int, members: Iterable[int]) -> float:
    s, r = remain_vector(op, members, t)
    i = np.searchsorted(s, v)
    if i >= s.size or s[i] != v:
        raise ValueError(f"vertex {v} is not in the set")
    return float(r[i])


def escape_probability(op: WalkOperator, v: int, t: int, members: Iterable[int]) -> float:
    return 1.0 - remain_probability(op, v, t, members)


def expected_remain_series(op: WalkOperator, members: Iterable[int], t_max: int) -> np.ndarray:
    """``E_{v ~ pi_S} rem(v, t, S)`` for ``t = 0..t_max``."""
    s = op.graph.vertex_set(members)
    if s.size == 0:
        raise ValueError("empty set")
    m = op.restricted(s)
    pi = op.graph.degree[s] / op.graph.degree[s].sum()
    out = np.empty(t_max + 1)
    r = np.ones(s.size)
    out[0] = 1.0
    for t in range(1, t_max + 1):
        r = m @ r
        out[t] = pi @ r
    return out


def expected_remain(op: WalkOperator, members: Iterable[int], t: int) -> float:
    return float(expected_remain_series(op, members, t)[-1])


def good_core(op: WalkOperator, members: Iterable[int], t: int, c: float = DEFAULT_CORE_CONSTANT) -> np.ndarray:
    """Vertices of ``S`` whose ``t``-step remain probability is at least ``c (1 - 3 phi(S)/2)^t``.

    The base is clamped at 0, so the threshold vanishes once ``phi(S) > 2/3``.
    """
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    s, r = remain_vector(op, members, t)
    phi = conductance(op.graph, s)[2]
    threshold = c * max(0.0, 1.0 - 1.5 * phi) ** t
    return s[r >= threshold]


def symmetrized_restricted(op: WalkOperator, members: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``D^1/2 I_S G I_S D^-1/2`` on ``S`` and the unit vector ``sqrt(pi_S)``."""
    s = op.graph.vertex_set(members)
    d = op.graph.degree[s]
    m = op.restricted(s).toarray()
    p = np.sqrt(d)[:, None] * m / np.sqrt(d)[None, :]
    return 0.5 * (p + p.T), np.sqrt(d / d.sum())


def sample_lazy_walk(op: WalkOperator, v: int, t: int, rng: np.random.Generator) -> list[int]:
    """One walk path ``[X_0 = v, ..., X_t]``; holds with probability 1/2 when the operator is lazy."""
    if not 0 <= v < op.graph.n:
        raise ValueError("invalid start vertex")
    path = [int(v)]
    x = int(v)
    for _ in range(t):
        if op.lazy and rng.random() < 0.5:
            path.append(x)
            continue
        x = op._move(x, rng.random())
        path.append(x)
    return path


def sample_lazy_walks(op: WalkOperator, v: int, t: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent paths as a ``(count, t+1)`` array (vectorized over walks)."""
    g = op.graph
    if not 0 <= v < g.n:
        raise ValueError("invalid start vertex")
    paths = np.empty((count, t + 1), dtype=np.int64)
    paths[:, 0] = v
    for k in range(1, t + 1):
        paths[:, k] = op.advance_many(paths[:, k - 1], rng)
    return paths
