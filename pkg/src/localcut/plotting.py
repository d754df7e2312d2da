"""Figure rendering for CLI reports. Files only; no interactive backends."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_curves(curves, path, title: str = "Lovász–Simonovits curves", every: int = 1):
    """One line per walk step; the straight line ``x / mu(V)`` is drawn for reference."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    cmap = plt.get_cmap("viridis")
    shown = list(enumerate(curves))[::every]
    for k, (t, c) in enumerate(shown):
        ax.plot(c.x, c.y, color=cmap(k / max(len(shown) - 1, 1)), lw=1.2, label=f"t={t}" if len(shown) <= 12 else None)
    top = curves[0].x[-1]
    ax.plot([0, top], [0, curves[0].y[-1]], "k--", lw=0.8)
    ax.set_xlabel("volume x")
    ax.set_ylabel("I(p_t, x)")
    ax.set_xlim(0, top)
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    if len(shown) <= 12:
        ax.legend(fontsize=7, ncol=2)
    _finish(fig, path)


def plot_sample_path(sample, path, stop_phi: float | None = None, title: str = "volume-biased ESP"):
    """Volume and conductance of ``S_t`` against ``t``."""
    t = np.arange(len(sample.volumes))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.step(t, sample.volumes, where="post")
    ax1.set_ylabel("mu(S_t)")
    ax1.set_yscale("log")
    ax2.step(t, sample.phis, where="post", color="C1")
    if stop_phi is not None:
        ax2.axhline(stop_phi, color="k", ls="--", lw=0.8)
    ax2.set_ylabel("phi(S_t)")
    ax2.set_xlabel("t")
    ax1.set_title(title)
    _finish(fig, path)
