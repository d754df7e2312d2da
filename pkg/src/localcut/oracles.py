"""Brute-force ground truth: exhaustive expansion profile, dense matrix powers, inertia counts.

These deliberately avoid the code paths they are used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graph import Graph

ENUMERATION_LIMIT = 22


@dataclass
class ProfilePoint:
    gamma: float
    members: np.ndarray
    phi: float
    volume: float


def _subset_tables(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Volume and boundary of every subset, indexed by bitmask."""
    n = g.n
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"subset enumeration limited to n <= {ENUMERATION_LIMIT}")
    a = g.adjacency.toarray()
    size = 1 << n
    vol = np.zeros(size)
    internal = np.zeros(size)
    for b in range(n):
        half = 1 << b
        # weight from b into each lower mask, built by doubling over bits u < b
        cross = np.zeros(1)
        for u in range(b):
            cross = np.concatenate([cross, cross + a[b, u]])
        vol[half : 2 * half] = vol[:half] + g.degree[b]
        internal[half : 2 * half] = internal[:half] + cross
    return vol, vol - 2.0 * internal


def _members(mask: int, n: int) -> np.ndarray:
    return np.array([i for i in range(n) if mask >> i & 1], dtype=np.int64)


def exact_expansion_profile(g: Graph, gamma: float) -> ProfilePoint:
    """Minimum conductance over all nonempty sets of volume at most ``gamma``.

    Ties go to the smaller volume, then the lexicographically smaller member list.
    """
    vol, bd = _subset_tables(g)
    vol[0] = np.inf
    ok = vol <= gamma
    if not ok.any():
        raise ValueError("no nonempty set has volume <= gamma")
    phi = np.full(vol.shape, np.inf)
    phi[ok] = np.maximum(bd[ok], 0.0) / vol[ok]
    best = phi.min()
    cand = np.flatnonzero(phi <= best + 1e-12)
    vmin = vol[cand].min()
    cand = cand[vol[cand] <= vmin + 1e-9]
    members = min((_members(int(c), g.n) for c in cand), key=lambda m: m.tolist())
    return ProfilePoint(gamma=gamma, members=members, phi=float(best), volume=float(vmin))


def exact_min_conductance(g: Graph) -> ProfilePoint:
    return exact_expansion_profile(g, g.total_volume / 2)


def all_set_conductances(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """``(volume, phi)`` for every nonempty subset (bitmask order, mask 0 dropped)."""
    vol, bd = _subset_tables(g)
    return vol[1:], np.maximum(bd[1:], 0.0) / vol[1:]


def dense_walk_matrix(g: Graph, lazy: bool = True) -> np.ndarray:
    a = g.adjacency.toarray()
    m = a / a.sum(axis=1, keepdims=True)
    return 0.5 * (np.eye(g.n) + m) if lazy else m


def dense_remain(g: Graph, members, t: int, lazy: bool = True) -> np.ndarray:
    """``rem(v, t, S)`` for ``v`` in sorted ``S`` via a dense matrix power."""
    s = np.unique(np.asarray(list(members)))
    m = dense_walk_matrix(g, lazy)[np.ix_(s, s)]
    return np.linalg.matrix_power(m, t) @ np.ones(s.size)


def enumerate_threshold_sets(g: Graph, p: np.ndarray) -> list[tuple[np.ndarray, float, float]]:
    """Every threshold set of ``p`` as ``(members, volume, phi)`` by direct recomputation."""
    order = sorted(range(g.n), key=lambda v: (-p[v] / g.degree[v], v))
    a = g.adjacency.toarray()
    out = []
    for i in range(1, g.n + 1):
        s = np.array(sorted(order[:i]))
        inside = np.zeros(g.n, dtype=bool)
        inside[s] = True
        vol = g.degree[s].sum()
        bd = a[np.ix_(inside, ~inside)].sum()
        out.append((s, float(vol), float(bd / vol)))
    return out


def count_eigenvalues_above(m: np.ndarray, theta: float) -> int:
    """Eigenvalues of symmetric ``m`` strictly above ``theta``, via Sylvester inertia of ``m - theta I``.

    Uses a Bunch-Kaufman LDL^T factorization, not an eigensolver on ``m``.
    """
    _, d, _ = scipy.linalg.ldl(m - theta * np.eye(m.shape[0]))
    count, i, n = 0, 0, d.shape[0]
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0:
            a, b, c = d[i, i], d[i + 1, i], d[i + 1, i + 1]
            # 2x2 pivot block: sign pattern from trace and determinant
            det = a * c - b * b
            if det < 0:
                count += 1
            elif a + c > 0:
                count += 2
            i += 2
        else:
            count += d[i, i] > 0
            i += 1
    return int(count)
