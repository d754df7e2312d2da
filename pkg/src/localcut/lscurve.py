"""Lovász–Simonovits curves, threshold sweeps and the expansion-profile search."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, conductance
from .walks import WalkOperator

DENSE_EIG_LIMIT = 4096
_PHI_SLACK = 1e-12


@dataclass(frozen=True)
class LSCurve:
    """Breakpoints ``(x[i], y[i])`` of ``I(p, .)``; ``order`` is the density permutation."""

    x: np.ndarray
    y: np.ndarray
    order: np.ndarray

    @property
    def total_volume(self) -> float:
        return float(self.x[-1])

    def __call__(self, x):
        return evaluate_curve(self, x)

    def to_json(self, g: Graph | None = None) -> dict:
        order = self.order if g is None else g.labels[self.order]
        return {"x": self.x.tolist(), "y": self.y.tolist(), "order": order.tolist()}


@dataclass
class SweepResult:
    members: np.ndarray
    phi: float
    volume: float
    boundary: float
    seed: int | None = None
    t: int | None = None
    threshold_index: int | None = None

    def to_json(self, g: Graph) -> dict:
        vol, bd, phi = conductance(g, self.members)
        return {
            "set": g.labels[self.members].tolist(),
            "phi": phi,
            "volume": vol,
            "boundary": bd,
            "seed": None if self.seed is None else int(g.labels[self.seed]),
            "t": self.t,
            "threshold_index": self.threshold_index,
        }


def density_order(g: Graph, p: np.ndarray) -> np.ndarray:
    """Vertices by decreasing ``p(v)/d(v)``, ties broken by increasing id."""
    if np.any(p < 0):
        raise ValueError("distribution has negative mass")
    return np.argsort(-(p / g.degree), kind="stable")


def build_curve(g: Graph, p: np.ndarray) -> LSCurve:
    order = density_order(g, p)
    x = np.concatenate([[0.0], np.cumsum(g.degree[order])])
    y = np.concatenate([[0.0], np.cumsum(p[order])])
    return LSCurve(x=x, y=y, order=order)


def evaluate_curve(curve: LSCurve, x):
    xs = np.asarray(x, dtype=float)
    top = curve.x[-1]
    if np.any(xs < -1e-9 * top) or np.any(xs > top * (1 + 1e-12)):
        raise ValueError(f"x must lie in [0, {top}]")
    out = np.interp(xs, curve.x, curve.y)
    return float(out) if out.ndim == 0 else out


def threshold_sweep(g: Graph, p: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(order, volume, boundary)`` for the threshold sets ``T_1..T_n`` of ``p``.

    ``volume[i]`` and ``boundary[i]`` describe ``T_{i+1}``, the first ``i+1``
    vertices of ``order``. Runs in ``O(m + n log n)``.
    """
    order, vol, bd = _batch_sweep(g, p[None, :])
    return order[0], vol[0], bd[0]


def _batch_sweep(g: Graph, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k, n = rows.shape
    order = np.argsort(-(rows / g.degree[None, :]), axis=1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(n)[None, :].repeat(k, axis=0), axis=1)
    lo, hi, w = g.edges()
    # an edge is internal to T_i once both endpoints are among the first i vertices
    pos = np.maximum(rank[:, lo], rank[:, hi]) + (np.arange(k) * n)[:, None]
    internal = np.bincount(pos.ravel(), weights=np.tile(w, k), minlength=k * n).reshape(k, n)
    vol = np.cumsum(g.degree[order], axis=1)
    bd = np.maximum(vol - 2.0 * np.cumsum(internal, axis=1), 0.0)
    return order, vol, bd


def _best_in_rows(vol: np.ndarray, bd: np.ndarray, volume_cap: float, phi_cap: float) -> np.ndarray:
    """Index of the smallest qualifying proper threshold set per row, or -1."""
    ok = (bd <= (phi_cap + _PHI_SLACK) * vol) & (vol <= volume_cap)
    ok[:, -1] = False  # T_n = V is never a cut
    first = np.argmax(ok, axis=1)
    return np.where(ok[np.arange(ok.shape[0]), first], first, -1)


def sweep_min_conductance(
    g: Graph, p: np.ndarray, volume_cap: float = math.inf, phi_cap: float = 1.0
) -> SweepResult | None:
    """Smallest-volume proper threshold set of ``p`` within both caps, if any."""
    if volume_cap <= 0 or phi_cap < 0:
        raise ValueError("caps must be positive")
    order, vol, bd = threshold_sweep(g, p)
    i = int(_best_in_rows(vol[None], bd[None], volume_cap, phi_cap)[0])
    if i < 0:
        return None
    return _result(g, order[: i + 1], threshold_index=i + 1)


def _result(g: Graph, members: np.ndarray, **provenance) -> SweepResult:
    members = np.sort(members)
    vol, bd, phi = conductance(g, members)
    return SweepResult(members=members, phi=phi, volume=vol, boundary=bd, **provenance)


@dataclass(frozen=True)
class ThresholdParams:
    phi: float
    eps: float
    horizon: int
    phi_cap: float
    volume_cap: float = math.inf

    @classmethod
    def derive(cls, g: Graph, phi: float, eps: float) -> "ThresholdParams":
        horizon = max(1, math.ceil(eps * math.log(g.total_volume) / phi))
        return cls(phi=phi, eps=eps, horizon=horizon, phi_cap=math.sqrt(2 * phi / eps))


def threshold_search(
    g: Graph,
    horizon: int,
    phi_cap: float,
    seeds=None,
    volume_cap: float = math.inf,
    workers: int = 1,
    chunk: int = 256,
) -> SweepResult | None:
    """Minimum-volume threshold set with conductance at most ``phi_cap`` over rows of ``G^t``.

    Rows are ``1_v G^t`` for every seed ``v`` and ``1 <= t <= horizon``. Ties in
    volume resolve to the smallest ``(seed, t, threshold_index)``.
    """
    op = WalkOperator(g)
    seeds = np.arange(g.n) if seeds is None else g.vertex_set(seeds)
    if seeds.size == 0:
        raise ValueError("need at least one seed")
    chunks = [seeds[i : i + chunk] for i in range(0, seeds.size, chunk)]

    def run(block: np.ndarray):
        rows = np.zeros((block.size, g.n))
        rows[np.arange(block.size), block] = 1.0
        best = None
        mt = op.matrix.T.tocsr()
        for t in range(1, horizon + 1):
            rows = (mt @ rows.T).T
            order, vol, bd = _batch_sweep(g, rows)
            idx = _best_in_rows(vol, bd, volume_cap, phi_cap)
            for r in np.flatnonzero(idx >= 0):
                i = int(idx[r])
                key = (float(vol[r, i]), int(block[r]), t, i + 1)
                if best is None or key < best[0]:
                    best = (key, order[r, : i + 1].copy())
        return best

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(run, chunks))
    else:
        found = [run(c) for c in chunks]
    found = [f for f in found if f is not None]
    if not found:
        return None
    (vol, seed, t, i), members = min(found, key=lambda f: f[0])
    return _result(g, members, seed=seed, t=t, threshold_index=i)


def threshold_algorithm(g: Graph, phi: float, eps: float, seeds=None, workers: int = 1) -> SweepResult | None:
    """Expansion-profile search: sweep rows of ``G^t`` for ``t <= ceil(eps ln mu(V) / phi)``.

    Returns the minimum-volume threshold set of conductance at most
    ``sqrt(2 phi / eps)``. If some ``U`` has ``phi(U) <= phi`` the result has
    volume at most ``2 mu(U)^(1+eps)``.
    """
    if not 0 < phi < 1:
        raise ValueError("phi must lie in (0, 1)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if eps > 0.25:
        warnings.warn("volume guarantee is only claimed for eps < 1/4", stacklevel=2)
    params = ThresholdParams.derive(g, phi, eps)
    return threshold_search(g, params.horizon, params.phi_cap, seeds=seeds, workers=workers)


# -- invariant checks ----------------------------------------------------------


@dataclass
class ChordReport:
    checked: int
    worst_slack: float
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def chord_check(
    g: Graph, p: np.ndarray, Phi: float | None = None, normalization: str = "volume", tol: float = 1e-9
) -> ChordReport:
    """Check ``I(pG, x) <= (I(p, x - delta) + I(p, x + delta)) / 2`` at threshold sets of ``pG``.

    ``normalization="volume"`` uses ``delta = 2 Phi min(x, mu(V) - x)`` at every
    proper threshold set with ``phi(T_i) >= Phi``; with ``Phi=None`` each set is
    tested at its own ``min(phi(T_i), 1/2)``. ``normalization="chain"`` uses the
    lazy-chain conductance, for which ``delta`` equals the boundary of ``T_i``.
    """
    if normalization not in ("volume", "chain"):
        raise ValueError("normalization must be 'volume' or 'chain'")
    if Phi is not None and not 0 <= Phi <= 0.5:
        raise ValueError("Phi must lie in [0, 1/2]")
    op = WalkOperator(g)
    q = op.step(p)
    before = build_curve(g, p)
    order, vol, bd = threshold_sweep(g, q)
    after_y = np.cumsum(q[order])
    mu = g.total_volume
    report = ChordReport(checked=0, worst_slack=math.inf)
    for i in range(g.n - 1):
        x, phi = vol[i], bd[i] / vol[i]
        if normalization == "chain":
            delta = bd[i]
        else:
            if Phi is not None and phi < Phi:
                continue
            level = min(phi, 0.5) if Phi is None else Phi
            delta = 2 * level * min(x, mu - x)
        lo, hi = max(x - delta, 0.0), min(x + delta, mu)
        rhs = 0.5 * (evaluate_curve(before, lo) + evaluate_curve(before, hi))
        slack = rhs - after_y[i]
        report.checked += 1
        report.worst_slack = min(report.worst_slack, slack)
        if slack < -tol:
            report.violations.append({"threshold_index": i + 1, "x": float(x), "phi": float(phi), "slack": float(slack)})
    return report


@dataclass
class CurveBoundStep:
    t: int
    premise: bool
    min_small_phi: float
    bound_holds: bool
    max_excess: float

    def to_json(self) -> dict:
        return {k: (v if not isinstance(v, float) or math.isfinite(v) else None) for k, v in self.__dict__.items()}


@dataclass
class CurveBoundReport:
    steps: list[CurveBoundStep]

    @property
    def first_premise_failure(self) -> int | None:
        return next((s.t for s in self.steps if not s.premise), None)

    @property
    def consistent(self) -> bool:
        """Bound holds at every step before the premise first fails."""
        stop = self.first_premise_failure
        return all(s.bound_holds for s in self.steps if stop is None or s.t < stop)

    def to_json(self) -> dict:
        return {
            "first_premise_failure": self.first_premise_failure,
            "consistent": self.consistent,
            "steps": [s.to_json() for s in self.steps],
        }


def curve_bound_check(g: Graph, v: int, T: int, Gamma: float, Phi: float, tol: float = 1e-9) -> CurveBoundReport:
    """Track ``I(1_v G^t, x)`` against ``x/Gamma + sqrt(x/d(v)) (1 - Phi^2/2)^t`` for ``t <= T``.

    Each step records whether every proper threshold set of volume at most
    ``Gamma`` has conductance at least ``Phi`` (the premise) and whether the
    bound holds at every breakpoint.
    """
    if not 0 < Phi <= 0.5:
        raise ValueError("Phi must lie in (0, 1/2]")
    if not 0 < Gamma <= g.total_volume:
        raise ValueError("Gamma must lie in (0, mu(V)]")
    op = WalkOperator(g)
    p = op.point_mass(v)
    dv = g.degree[v]
    steps = []
    for t in range(T + 1):
        if t:
            p = op.step(p)
        order, vol, bd = threshold_sweep(g, p)
        small = vol[:-1] <= Gamma
        phis = bd[:-1][small] / vol[:-1][small]
        min_phi = float(phis.min()) if phis.size else math.inf
        curve = build_curve(g, p)
        rhs = curve.x / Gamma + np.sqrt(curve.x / dv) * (1 - Phi**2 / 2) ** t
        excess = float(np.max(curve.y - rhs))
        steps.append(
            CurveBoundStep(t=t, premise=min_phi >= Phi, min_small_phi=min_phi, bound_holds=excess <= tol, max_excess=excess)
        )
    return CurveBoundReport(steps)


# -- threshold rank --------------------------------------------------------------


def normalized_adjacency(g: Graph) -> np.ndarray:
    """Dense ``D^-1/2 A D^-1/2``, similar to ``D^-1 A``."""
    if g.n > DENSE_EIG_LIMIT:
        raise ValueError(f"dense eigensolve limited to n <= {DENSE_EIG_LIMIT}")
    s = 1.0 / np.sqrt(g.degree)
    return s[:, None] * g.adjacency.toarray() * s[None, :]


def walk_spectrum(g: Graph) -> np.ndarray:
    """Eigenvalues of ``D^-1 A`` in ascending order."""
    return np.linalg.eigvalsh(normalized_adjacency(g))


def threshold_rank(g: Graph, eta: float, tol: float = 1e-10) -> int:
    """Number of eigenvalues of ``D^-1 A`` (with multiplicity) strictly above ``1 - eta``."""
    if not 0 < eta <= 2:
        raise ValueError("eta must lie in (0, 2]")
    return int(np.count_nonzero(walk_spectrum(g) > 1 - eta + tol))


@dataclass
class StructuralReport:
    phi: float
    eps: float
    premise_met: bool
    eta: float | None = None
    rank: int | None = None
    required_rank: float | None = None
    horizon: int | None = None
    phi_cap: float | None = None
    volume_bound: float | None = None
    result: SweepResult | None = None
    witness: dict | None = None

    @property
    def conclusion_met(self) -> bool:
        return bool(
            self.premise_met
            and self.result is not None
            and self.result.volume <= self.volume_bound * (1 + 1e-12)
            and self.result.phi <= self.phi_cap + _PHI_SLACK
        )

    def to_json(self, g: Graph) -> dict:
        out = {k: getattr(self, k) for k in ("phi", "eps", "premise_met", "eta", "rank", "required_rank", "horizon", "phi_cap", "volume_bound")}
        out["conclusion_met"] = self.conclusion_met
        out["result"] = None if self.result is None else self.result.to_json(g)
        out["witness"] = self.witness
        return out


def abs_structural_check(g: Graph, phi: float, eps: float, grid=None) -> StructuralReport:
    """Threshold-rank premise, small non-expanding set conclusion, and trace witness.

    Picks the largest ``eta`` on ``grid`` (default ``0.01, 0.02, ..., 2``) with
    ``rank_{1-eta}(D^-1 A) >= n^((1+eps) eta / phi)``, then sweeps rows of
    ``G^t`` for ``t <= ceil(eps ln n / phi)`` at conductance ``sqrt(2 phi / eps)``.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if not 0 < phi <= 0.5:
        raise ValueError("phi must lie in (0, 1/2]")
    n = g.n
    eigs = walk_spectrum(g)
    grid = np.round(np.arange(1, 201) * 0.01, 10) if grid is None else np.asarray(grid, dtype=float)
    report = StructuralReport(phi=phi, eps=eps, premise_met=False)
    chosen = None
    for eta in grid:
        r = int(np.count_nonzero(eigs > 1 - eta + 1e-10))
        need = n ** ((1 + eps) * eta / phi)
        # relative slack: n^(...) lands exactly on integers for clique unions
        if r >= need * (1 - 1e-12) and (chosen is None or eta > chosen[0]):
            chosen = (float(eta), r, float(need))
    if chosen is None:
        return report
    eta, r, need = chosen
    horizon = max(1, math.ceil(eps * math.log(n) / phi))
    cap = math.sqrt(2 * phi / eps)
    report.premise_met = True
    report.eta, report.rank, report.required_rank = eta, r, need
    report.horizon, report.phi_cap = horizon, cap
    report.volume_bound = 4 * g.total_volume * n ** (-eta / phi)
    report.result = threshold_search(g, horizon, cap)
    # diagonal of G^t from the symmetric similarity transform
    lam, vecs = np.linalg.eigh(normalized_adjacency(g))
    diag = (vecs**2) @ (((1 + lam) / 2) ** horizon)
    floor = np.maximum(1 / (2 * n), g.degree / (2 * g.total_volume)) * r * (1 - eta / 2) ** horizon
    u = int(np.argmax(diag / floor))
    report.witness = {
        "vertex": int(g.labels[u]),
        "t": horizon,
        "return_probability": float(diag[u]),
        "required": float(floor[u]),
        "holds": bool(diag[u] >= floor[u] * (1 - 1e-12)),
    }
    return report
