"""Evolving set process, its volume-biased variant, and the ParESP local clustering search."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, conductance
from .walks import DEFAULT_CORE_CONSTANT, WalkOperator

KERNEL_GUARD = 10_000


@dataclass(frozen=True)
class RetentionProfile:
    """``q(y)``: chance that one lazy step from ``y`` lands in ``S``, on ``S`` and its neighbors."""

    n: int
    vertices: np.ndarray
    q: np.ndarray
    support_volume: float

    def value(self, y: int) -> float:
        i = np.searchsorted(self.vertices, y)
        if i < self.vertices.size and self.vertices[i] == y:
            return float(self.q[i])
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.vertices.tolist(), self.q.tolist()))


def retention(g: Graph, members) -> RetentionProfile:
    s = g.vertex_set(members)
    if s.size == 0:
        raise ValueError("retention profile of the empty set is undefined")
    inside = np.zeros(g.n, dtype=bool)
    inside[s] = True
    into = np.zeros(g.n)
    # weight from each vertex into S, accumulated over S's adjacency rows (A is symmetric)
    for v in s:
        nbrs, ws = g.neighbors(v)
        into[nbrs] += ws
    support = np.flatnonzero(inside | (into > 0))
    q = 0.5 * inside[support] + 0.5 * into[support] / g.degree[support]
    return RetentionProfile(n=g.n, vertices=support, q=q, support_volume=float(g.degree[support].sum()))


def esp_step(profile: RetentionProfile, R: float) -> np.ndarray:
    """``{u : q(u) >= R}``."""
    if not 0 <= R <= 1:
        raise ValueError("R must lie in [0, 1]")
    if R <= 0:
        return np.arange(profile.n)
    return profile.vertices[profile.q >= R]


def esp_kernel(g: Graph, members) -> list[tuple[np.ndarray, float]]:
    """Exact one-step ESP kernel from ``S``, largest successor first.

    Successors are the super-level sets of the retention profile; each one's
    probability is the length of the threshold interval that selects it.
    """
    s = g.vertex_set(members)
    if s.size == 0:
        return [(s, 1.0)]
    prof = retention(g, s)
    levels = np.unique(prof.q)[::-1]
    if levels.size > KERNEL_GUARD:
        raise ValueError(f"retention profile has {levels.size} distinct values (limit {KERNEL_GUARD})")
    out: list[tuple[np.ndarray, float]] = []
    below = np.concatenate([levels[1:], [0.0]])
    for level, nxt in zip(levels[::-1], below[::-1]):
        width = level - nxt
        if width > 0:
            out.append((prof.vertices[prof.q >= level], float(width)))
    top = float(levels[0])
    if top < 1:
        out.append((np.empty(0, dtype=np.int64), 1.0 - top))
    return out


def volume_biased_kernel(g: Graph, members) -> list[tuple[np.ndarray, float]]:
    """``K(S, S') mu(S') / mu(S)``: the ESP conditioned on absorption at ``V``."""
    vol = g.volume(members)
    return [(t, p * g.volume(t) / vol) for t, p in esp_kernel(g, members) if t.size]


def growth_gauge(g: Graph, members) -> float:
    """``1 - E[sqrt(mu(S_1) / mu(S))]`` under the ESP kernel."""
    vol = g.volume(members)
    if vol == 0:
        raise ValueError("growth gauge of the empty set is undefined")
    return 1.0 - sum(p * math.sqrt(g.volume(t) / vol) for t, p in esp_kernel(g, members))


# -- volume-biased simulation ------------------------------------------------------


@dataclass
class _SetStats:
    profile: RetentionProfile
    volume: float
    phi: float
    psi: float | None = None


class _StatsCache:
    """Per-set retention profile, volume, conductance and (lazily) growth gauge."""

    def __init__(self, g: Graph, track_gauge: bool):
        self.g = g
        self.track_gauge = track_gauge
        self._memo: dict[bytes, _SetStats] = {}

    def get(self, s: np.ndarray) -> _SetStats:
        key = s.tobytes()
        hit = self._memo.get(key)
        if hit is None:
            vol, _, phi = conductance(self.g, s)
            hit = _SetStats(profile=retention(self.g, s), volume=vol, phi=phi)
            if self.track_gauge:
                hit.psi = growth_gauge(self.g, s)
            if len(self._memo) < 100_000:
                self._memo[key] = hit
        return hit


def _walk_step(g: Graph, x: int, rng: np.random.Generator) -> int:
    if rng.random() < 0.5:
        return x
    nbrs, ws = g.neighbors(x)
    cum = np.cumsum(ws)
    j = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return int(nbrs[min(j, nbrs.size - 1)])


def _vb_advance(g: Graph, prof: RetentionProfile, x: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    x_next = _walk_step(g, x, rng)
    u = rng.random() * prof.value(x_next)
    # x_next has q > 0 here: it stayed in S or stepped along an edge into S
    return prof.vertices[prof.q >= u], x_next


def vb_step(g: Graph, members, x: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """One coupled step of the volume-biased ESP.

    The walk moves ``x -> x'`` lazily, then the threshold is drawn uniformly
    from ``[0, q(x')]``. When ``x`` is distributed as ``pi_S`` the new set has
    the volume-biased law and ``x'`` is distributed as ``pi_{S'}``.
    """
    s = g.vertex_set(members)
    i = np.searchsorted(s, x)
    if i >= s.size or s[i] != x:
        raise ValueError(f"walker {x} is not in the current set")
    return _vb_advance(g, retention(g, s), int(x), rng)


def vb_step_batch(
    g: Graph, members, xs: np.ndarray, rng: np.random.Generator, op: WalkOperator | None = None
) -> tuple[RetentionProfile, np.ndarray, np.ndarray]:
    """Vectorized :func:`vb_step` from one set and many walker positions.

    Returns ``(profile, thresholds, x_next)``; draw ``j`` moves to the set
    ``{y : q(y) >= thresholds[j]}``, i.e. ``profile.vertices[profile.q >= thresholds[j]]``.
    """
    s = g.vertex_set(members)
    xs = np.asarray(xs, dtype=np.int64)
    if not np.all(np.isin(xs, s)):
        raise ValueError("every walker must be in the current set")
    prof = retention(g, s)
    q = np.zeros(g.n)
    q[prof.vertices] = prof.q
    x_next = (op or WalkOperator(g)).advance_many(xs, rng)
    return prof, rng.random(xs.size) * q[x_next], x_next


@dataclass
class SamplePath:
    sets: list[np.ndarray]
    volumes: list[float]
    phis: list[float]
    psis: list[float | None]
    martingale: list[float | None]
    work: list[float]
    walker: list[int]
    outcome: str = "horizon"

    @property
    def steps(self) -> int:
        return len(self.sets) - 1

    def trace(self, g: Graph):
        """Per-step records for line-delimited JSON output."""
        for t, s in enumerate(self.sets):
            yield {
                "t": t,
                "set": g.labels[s].tolist(),
                "volume": self.volumes[t],
                "phi": self.phis[t],
                "psi": self.psis[t],
                "martingale": self.martingale[t],
                "work": self.work[t],
            }

    def to_json(self, g: Graph) -> dict:
        return {"outcome": self.outcome, "steps": self.steps, "trace": list(self.trace(g))}


StopRule = Callable[[np.ndarray, float, float], bool]


class _VBRun:
    """Incremental volume-biased ESP from ``{v}``; one ``advance`` per step."""

    def __init__(self, g: Graph, v: int, rng: np.random.Generator, cache: _StatsCache):
        self.g, self.rng, self.cache = g, rng, cache
        s = np.array([v], dtype=np.int64)
        st = cache.get(s)
        self.path = SamplePath(
            sets=[s], volumes=[st.volume], phis=[st.phi], psis=[st.psi],
            martingale=[1.0 if cache.track_gauge else None], work=[0.0], walker=[int(v)],
        )
        self._log_prod = 0.0
        self._stats = st
        self.done = False

    def advance(self) -> None:
        p, st = self.path, self._stats
        s_next, x_next = _vb_advance(self.g, st.profile, p.walker[-1], self.rng)
        nxt = self.cache.get(s_next)
        if st.psi is not None:
            self._log_prod -= math.log1p(-st.psi)
            m = math.sqrt(p.volumes[0] / nxt.volume) * math.exp(self._log_prod)
        else:
            m = None
        p.sets.append(s_next)
        p.volumes.append(nxt.volume)
        p.phis.append(nxt.phi)
        p.psis.append(nxt.psi)
        p.martingale.append(m)
        p.work.append(p.work[-1] + st.profile.support_volume)
        p.walker.append(x_next)
        self._stats = nxt
        if s_next.size == self.g.n:
            p.outcome = "absorbed"
            self.done = True


def run_vb_esp(
    g: Graph,
    v: int,
    T: int,
    rng: np.random.Generator,
    stop: StopRule | None = None,
    track_gauge: bool = True,
    cache: _StatsCache | None = None,
) -> SamplePath:
    """Simulate the volume-biased ESP from ``{v}`` for up to ``T`` steps.

    ``stop(set, volume, phi)`` is checked on every set from ``S_0`` on;
    reaching ``V`` ends the run with outcome ``"absorbed"`` instead. The
    martingale column is ``sqrt(mu(S_0)/mu(S_t)) prod_{i<t} 1/(1 - psi(S_i))``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if not 0 <= v < g.n:
        raise ValueError("invalid start vertex")
    cache = cache or _StatsCache(g, track_gauge)
    run = _VBRun(g, v, rng, cache)
    p = run.path
    if stop is not None and stop(p.sets[0], p.volumes[0], p.phis[0]):
        p.outcome = "stopped"
        return p
    for _ in range(T):
        run.advance()
        if run.done:
            break
        if stop is not None and stop(p.sets[-1], p.volumes[-1], p.phis[-1]):
            p.outcome = "stopped"
            break
    return p


# -- ParESP ------------------------------------------------------------------------


@dataclass
class ParEspConfig:
    gamma: float
    phi: float
    eps: float
    seed: int
    c: float = DEFAULT_CORE_CONSTANT
    max_copies: int = 64
    copies: int | None = None
    horizon: int | None = None
    stop_volume: float | None = None
    stop_phi: float | None = None
    copies_capped: bool = field(default=False, init=False)

    def __post_init__(self):
        if self.gamma < 1:
            raise ValueError("gamma must be at least 1")
        if not 0 < self.phi < 1:
            raise ValueError("phi must lie in (0, 1)")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if not 0 < self.c <= 1:
            raise ValueError("c must lie in (0, 1]")
        if self.copies is None:
            k = max(1, math.ceil(self.gamma ** (self.eps / 2)))
            self.copies_capped = k > self.max_copies
            self.copies = min(k, self.max_copies)
        if self.horizon is None:
            self.horizon = max(1, math.ceil(self.eps * math.log(self.gamma) / (6 * self.phi)))
        if self.stop_volume is None:
            self.stop_volume = 2 * self.gamma ** (1 + self.eps / 2) / self.c
        if self.stop_phi is None:
            self.stop_phi = math.sqrt(200 * (1 - math.log(self.c)) * self.phi / self.eps)
        if self.copies < 1 or self.horizon < 1 or self.stop_volume <= 0:
            raise ValueError("copies, horizon and stop volume must be positive")
        if self.stop_phi < 0:
            raise ValueError("stop_phi must be nonnegative")

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in (
            "gamma", "phi", "eps", "seed", "c", "copies", "copies_capped", "horizon", "stop_volume", "stop_phi",
        )}


@dataclass
class CutResult:
    members: np.ndarray
    phi: float
    volume: float
    copy: int
    step: int

    def to_json(self, g: Graph) -> dict:
        vol, bd, phi = conductance(g, self.members)
        return {"set": g.labels[self.members].tolist(), "phi": phi, "volume": vol, "boundary": bd,
                "copy": self.copy, "step": self.step}


@dataclass
class ParEspOutcome:
    result: CutResult | None
    total_work: float
    steps_run: int
    copy_outcomes: list[str]
    paths: list[SamplePath]

    @property
    def found(self) -> bool:
        return self.result is not None

    @property
    def work_per_volume(self) -> float | None:
        return None if self.result is None else self.total_work / self.result.volume

    def to_json(self, g: Graph) -> dict:
        return {
            "found": self.found,
            "result": None if self.result is None else self.result.to_json(g),
            "total_work": self.total_work,
            "work_per_volume": self.work_per_volume,
            "steps_run": self.steps_run,
            "copy_outcomes": self.copy_outcomes,
        }


def copy_rngs(seed: int, k: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


def par_esp(g: Graph, v: int, cfg: ParEspConfig, track_gauge: bool = False) -> ParEspOutcome:
    """Run ``cfg.copies`` volume-biased ESPs from ``{v}`` in lockstep.

    The search stops at the first step where some copy holds a set with
    ``mu(S) <= stop_volume`` and ``phi(S) <= stop_phi``; among several, the
    lowest copy index wins. A copy that reaches ``V`` drops out.
    """
    if not 0 <= v < g.n:
        raise ValueError("invalid start vertex")
    cache = _StatsCache(g, track_gauge)
    runs = [_VBRun(g, v, rng, cache) for rng in copy_rngs(cfg.seed, cfg.copies)]

    def qualifies(run: _VBRun) -> bool:
        p = run.path
        return not run.done and p.volumes[-1] <= cfg.stop_volume and p.phis[-1] <= cfg.stop_phi

    def finish(step: int) -> ParEspOutcome:
        winner = next((i for i, r in enumerate(runs) if qualifies(r)), None)
        result = None
        if winner is not None:
            p = runs[winner].path
            result = CutResult(members=p.sets[-1], phi=p.phis[-1], volume=p.volumes[-1], copy=winner, step=step)
        outcomes = ["absorbed" if r.done else ("stopped" if i == winner else "running") for i, r in enumerate(runs)]
        return ParEspOutcome(
            result=result,
            total_work=float(sum(r.path.work[-1] for r in runs)),
            steps_run=step,
            copy_outcomes=outcomes,
            paths=[r.path for r in runs],
        )

    if any(qualifies(r) for r in runs):
        return finish(0)
    for step in range(1, cfg.horizon + 1):
        for r in runs:
            if not r.done:
                r.advance()
        if any(qualifies(r) for r in runs):
            return finish(step)
        if all(r.done for r in runs):
            return finish(step)
    out = finish(cfg.horizon)
    out.copy_outcomes = ["absorbed" if r.done else "horizon" for r in runs]
    return out
