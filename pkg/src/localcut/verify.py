"""Invariant suites run by ``localcut verify`` against an arbitrary input graph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import esp, lscurve, mixing, oracles, walks
from .graph import Graph, components, conductance, parse_edge_list, write_edge_list

SUITES = ("graph", "walks", "curve", "esp", "mixing")


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    informational: bool = False

    def to_json(self) -> dict:
        return dict(self.__dict__)


def probe_sets(g: Graph, limit: int = 40, max_vertices: int = 16) -> list[np.ndarray]:
    """Deterministic sample of proper vertex sets: walk threshold sets from a few seeds."""
    op = walks.WalkOperator(g)
    seeds = np.linspace(0, g.n - 1, num=min(g.n, max_vertices)).round().astype(int)
    seen: dict[bytes, np.ndarray] = {}
    for v in np.unique(seeds):
        p = op.point_mass(int(v))
        for t in range(6):
            order, vol, _ = lscurve.threshold_sweep(g, p)
            for i in range(g.n - 1):
                if vol[i] > g.total_volume / 2:
                    break
                s = np.sort(order[: i + 1])
                seen.setdefault(s.tobytes(), s)
            p = op.step(op.step(p))
    sets = list(seen.values())
    if len(sets) > limit:
        pick = np.linspace(0, len(sets) - 1, num=limit).round().astype(int)
        sets = [sets[i] for i in pick]
    return sets


def check_graph(g: Graph) -> list[Check]:
    a = g.adjacency
    out = [
        Check("graph", "symmetric adjacency", abs(a - a.T).max() == 0 if a.nnz else True),
        Check("graph", "positive weights", bool(np.all(g.weights > 0))),
        Check("graph", "degree equals incident weight", bool(np.allclose(np.asarray(a.sum(axis=1)).ravel(), g.degree))),
        Check("graph", "round trip through edge list", parse_edge_list(write_edge_list(g)) == g),
    ]
    _, _, phi_v = conductance(g, range(g.n))
    out.append(Check("graph", "phi(V) = 0", phi_v == 0.0))
    return out


def check_walks(g: Graph, sets: list[np.ndarray], t_max: int = 50) -> list[Check]:
    op = walks.WalkOperator(g)
    chain_worst, one_step_worst, core_ok, psd_worst = math.inf, 0.0, True, math.inf
    for s in sets:
        phi = conductance(g, s)[2]
        series = walks.expected_remain_series(op, s, t_max)
        chain_worst = min(chain_worst, float(np.min(series[1:] - (1 - phi / 2) * series[:-1])))
        one_step_worst = max(one_step_worst, abs(series[1] - (1 - phi / 2)))
        for t in (1, 5, 10, 25, t_max):
            core = walks.good_core(op, s, t)
            core_ok &= g.degree[core].sum() >= g.degree[s].sum() / 2 - 1e-12
        if s.size <= 256:
            p, x = walks.symmetrized_restricted(op, s)
            vals = [1.0]
            v = x.copy()
            for _ in range(20):
                v = p @ v
                vals.append(float(x @ v))
            vals = np.array(vals)
            psd_worst = min(psd_worst, float(np.min(vals[2:] - vals[1:-1] * vals[1])))
    return [
        Check("walks", "expected remain chain", chain_worst >= -1e-9, f"worst slack {chain_worst:.3e}"),
        Check("walks", "one-step identity 1 - phi/2", one_step_worst <= 1e-10, f"worst error {one_step_worst:.3e}"),
        Check("walks", "good core has half the volume", bool(core_ok)),
        Check("walks", "PSD power inequality", psd_worst >= -1e-9, f"worst slack {psd_worst:.3e}"),
    ]


def check_curve(g: Graph, steps: int = 20, max_vertices: int = 16) -> list[Check]:
    op = walks.WalkOperator(g)
    shape_ok, dominance, chain_ok, literal_ok = True, math.inf, True, True
    for v in np.unique(np.linspace(0, g.n - 1, num=min(g.n, max_vertices)).round().astype(int)):
        p = op.point_mass(int(v))
        for _ in range(steps):
            cur = lscurve.build_curve(g, p)
            slopes = np.diff(cur.y) / np.diff(cur.x)
            shape_ok &= bool(np.all(np.diff(cur.x) > 0) and np.all(np.diff(cur.y) >= -1e-15) and np.all(np.diff(slopes) <= 1e-12))
            q = op.step(p)
            nxt = lscurve.build_curve(g, q)
            xs = np.union1d(cur.x, nxt.x)
            dominance = min(dominance, float(np.min(cur(xs) - nxt(xs))))
            chain_ok &= lscurve.chord_check(g, p, normalization="chain").passed
            literal_ok &= lscurve.chord_check(g, p).passed
            p = q
    return [
        Check("curve", "monotone concave curves", bool(shape_ok)),
        Check("curve", "walk steps never raise the curve", dominance >= -1e-9, f"worst slack {dominance:.3e}"),
        Check("curve", "chord inequality (lazy-chain conductance)", bool(chain_ok)),
        Check("curve", "chord inequality (phi = boundary/volume, spread 2 phi min(x, mu-x))", bool(literal_ok),
              "" if literal_ok else "fails as expected for this normalization; see README", informational=True),
    ]


def check_esp(g: Graph, sets: list[np.ndarray]) -> list[Check]:
    sums, gauge, mart = 0.0, math.inf, 0.0
    for s in sets:
        kern = esp.esp_kernel(g, s)
        sums = max(sums, abs(sum(p for _, p in kern) - 1))
        psi = esp.growth_gauge(g, s)
        phi = conductance(g, s)[2]
        gauge = min(gauge, psi - phi**2 / 8)
        vol = g.volume(s)
        ident = sum(p * math.sqrt(vol / g.volume(t)) for t, p in esp.volume_biased_kernel(g, s)) / (1 - psi)
        mart = max(mart, abs(ident - 1))
    empty = esp.esp_kernel(g, [])
    full = esp.esp_kernel(g, range(g.n))
    absorbing = empty[0][0].size == 0 and empty[0][1] == 1.0 and len(full) == 1 and full[0][0].size == g.n
    return [
        Check("esp", "kernel sums to one", sums <= 1e-12, f"worst error {sums:.3e}"),
        Check("esp", "empty set and V absorb", bool(absorbing)),
        Check("esp", "growth gauge >= phi^2/8", gauge >= -1e-12, f"worst slack {gauge:.3e}"),
        Check("esp", "one-step martingale identity", mart <= 1e-9, f"worst error {mart:.3e}"),
    ]


def check_mixing(g: Graph, epsilons=(0.5, 0.25, 0.1)) -> list[Check]:
    if len(components(g)) > 1:
        return [Check("mixing", "connected graph required", True, "skipped: disconnected", informational=True)]
    if g.n > oracles.ENUMERATION_LIMIT:
        return [Check("mixing", "exact profile oracle", True, f"skipped: n > {oracles.ENUMERATION_LIMIT}", informational=True)]
    phi_g = oracles.exact_min_conductance(g).phi
    out = []
    for eps in epsilons:
        tu = mixing.uniform_mixing_time(g, eps)
        tv = mixing.tv_mixing_time(g, eps)
        js = mixing.jerrum_sinclair_bound(g, phi_g, eps)
        mu = g.total_volume
        lower_ok = True
        for gamma in sorted({float(x) for x in g.degree} | {mu / 4, mu / 2}):
            if 1 <= gamma <= mu / 2:
                lb = mixing.mixing_lower_bound(mu, gamma, oracles.exact_expansion_profile(g, gamma).phi or math.inf)
                lower_ok &= math.ceil(max(0.0, lb)) <= tu
        out += [
            Check("mixing", f"tau_tv <= tau_uniform (eps={eps})", tv <= tu, f"{tv} <= {tu}"),
            Check("mixing", f"Jerrum-Sinclair upper bound (eps={eps})", tu <= js, f"{tu} <= {js:.2f}"),
            Check("mixing", f"expansion-profile lower bound (eps={eps})", bool(lower_ok)),
        ]
    return out


def run_suites(g: Graph, suites=("all",)) -> list[Check]:
    wanted = SUITES if "all" in suites else tuple(suites)
    unknown = set(wanted) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s): {sorted(unknown)}")
    sets = probe_sets(g) if {"walks", "esp"} & set(wanted) else []
    runners = {
        "graph": lambda: check_graph(g),
        "walks": lambda: check_walks(g, sets),
        "curve": lambda: check_curve(g),
        "esp": lambda: check_esp(g, sets),
        "mixing": lambda: check_mixing(g),
    }
    out: list[Check] = []
    for name in wanted:
        out += runners[name]()
    return out
