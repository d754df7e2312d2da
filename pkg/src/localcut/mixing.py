"""Uniform and total-variation mixing times by exact propagation, and bounds on them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, components, conductance, stationary
from .lscurve import DENSE_EIG_LIMIT, walk_spectrum
from .walks import WalkOperator


class MixingError(RuntimeError):
    """The chain does not mix: disconnected graph, periodic chain, or horizon exceeded."""


@dataclass
class MixingReport:
    epsilon: float
    tau_tv: int
    tau_uniform: int
    lower_bound: float | None
    jerrum_sinclair_upper: float | None

    def to_json(self) -> dict:
        return asdict(self)


def jerrum_sinclair_bound(g: Graph, phi_g: float, epsilon: float) -> float:
    """``2/phi(G)^2 (ln(1/min pi) + ln(1/eps))`` for the lazy walk."""
    pi_min = float((g.degree / g.total_volume).min())
    return 2.0 / phi_g**2 * (math.log(1 / pi_min) + math.log(1 / epsilon))


def _horizon(g: Graph, epsilon: float, lazy: bool) -> int:
    # phi(G) >= gap/2 (Cheeger), so this caps at 10x a valid Jerrum-Sinclair bound
    eigs = walk_spectrum(g)
    if not lazy and eigs[0] < -1 + 1e-9:
        raise MixingError("non-lazy walk on a bipartite graph is periodic and never mixes")
    gap = 1.0 - eigs[-2] if g.n > 1 else 1.0
    if gap <= 1e-12:
        raise MixingError("graph is disconnected")
    bound = jerrum_sinclair_bound(g, gap / 2, epsilon)
    if not lazy:
        bound = max(bound, 2.0 / (1 - abs(eigs[0])) * (math.log(g.total_volume) + math.log(1 / epsilon)))
    return int(10 * math.ceil(bound)) + 10


def _mixing_time(g: Graph, epsilon: float, lazy: bool, criterion: str) -> int:
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if g.n > DENSE_EIG_LIMIT:
        raise ValueError(f"mixing search limited to n <= {DENSE_EIG_LIMIT}")
    if len(components(g)) > 1:
        raise MixingError("graph is disconnected")
    cap = _horizon(g, epsilon, lazy)
    m = WalkOperator(g, lazy=lazy).matrix.toarray()
    pi = stationary(g)
    pt = np.eye(g.n)
    for t in range(1, cap + 1):
        pt = pt @ m
        if criterion == "uniform":
            dev = np.max(np.abs(1.0 - pt / pi[None, :]))
        else:
            dev = np.max(np.abs(pt - pi[None, :]).sum(axis=1))
        if dev <= epsilon + 1e-12:
            return t
    raise MixingError(f"did not mix within {cap} steps")


def uniform_mixing_time(g: Graph, epsilon: float, lazy: bool = True) -> int:
    """Smallest ``t`` with ``|1 - P^t(u, v) / pi(v)| <= epsilon`` for all ``u, v``."""
    return _mixing_time(g, epsilon, lazy, "uniform")


def tv_mixing_time(g: Graph, epsilon: float, lazy: bool = True) -> int:
    """Smallest ``t`` with ``sum_v |P^t(u, v) - pi(v)| <= epsilon`` for all ``u``."""
    return _mixing_time(g, epsilon, lazy, "tv")


def mixing_lower_bound(mu_v: float, gamma: float, phi_gamma: float) -> float:
    """``ln(mu(V) / 2 gamma) / phi(gamma) - 2``; may be negative."""
    if not 1 <= gamma <= mu_v / 2:
        raise ValueError("gamma must lie in [1, mu(V)/2]")
    if phi_gamma <= 0:
        raise ValueError("phi(gamma) must be positive")
    return math.log(mu_v / (2 * gamma)) / phi_gamma - 2


def mixing_report(
    g: Graph, epsilon: float, gamma: float | None = None, phi_gamma: float | None = None, phi_g: float | None = None
) -> MixingReport:
    lower = None
    if gamma is not None and phi_gamma is not None:
        lower = mixing_lower_bound(g.total_volume, gamma, phi_gamma)
    return MixingReport(
        epsilon=epsilon,
        tau_tv=tv_mixing_time(g, epsilon),
        tau_uniform=uniform_mixing_time(g, epsilon),
        lower_bound=lower,
        jerrum_sinclair_upper=None if phi_g is None else jerrum_sinclair_bound(g, phi_g, epsilon),
    )


@dataclass
class EvenRemainReport:
    t: int
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - 1e-9


def nonlazy_even_remain_check(g: Graph, members, t: int) -> EvenRemainReport:
    """``pi_S' (I_S D^-1 A I_S)^(2t) 1_S`` against ``(1 - phi(S))^(2t)``."""
    if t < 1:
        raise ValueError("t must be at least 1")
    s = g.vertex_set(members)
    if s.size == 0:
        raise ValueError("empty set")
    m = WalkOperator(g, lazy=False).restricted(s)
    r = np.ones(s.size)
    for _ in range(2 * t):
        r = m @ r
    pi = g.degree[s] / g.degree[s].sum()
    phi = conductance(g, s)[2]
    return EvenRemainReport(t=t, lhs=float(pi @ r), rhs=(1 - phi) ** (2 * t))
