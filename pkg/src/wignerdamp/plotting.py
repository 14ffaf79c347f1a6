"""Matplotlib figures for run reports.

Everything renders with the Agg backend straight to files; no figure is
left open after a call returns.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .grid import WignerField  # noqa: E402
from .observables import MomentRecord, density  # noqa: E402

FIG_DPI = 120
plt.rcParams.update({
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.figsize": (6.4, 4.0),
})


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)
    return path


def plot_moments(series: Sequence[MomentRecord], path, title: str = "") -> Path:
    """Four panels: <x>, <p>, the two variances, and the covariance."""
    t = np.array([m.t for m in series])
    fig, axes = plt.subplots(2, 2, figsize=(8, 5.5), sharex=True)
    axes[0, 0].plot(t, [m.x_avg for m in series])
    axes[0, 0].set_ylabel("<x>")
    axes[0, 1].plot(t, [m.p_avg for m in series])
    axes[0, 1].set_ylabel("<p>")
    axes[1, 0].plot(t, [m.sigma20 for m in series], label="sigma20")
    ax2 = axes[1, 0].twinx()
    ax2.plot(t, [m.sigma02 for m in series], color="C1", label="sigma02")
    ax2.grid(False)
    axes[1, 0].set_ylabel("sigma20 (C0) / sigma02 (C1)")
    axes[1, 1].plot(t, [m.sigma11 for m in series])
    axes[1, 1].set_ylabel("sigma11")
    for ax in axes[1]:
        ax.set_xlabel("t")
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def plot_densities(fields: Mapping[float, WignerField], path, title: str = "",
                   xlim: tuple[float, float] | None = None) -> Path:
    fig, ax = plt.subplots()
    for t in sorted(fields):
        fld = fields[t]
        ax.plot(fld.grid.x, density(fld), lw=1, label=f"t={t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("n(x)")
    if xlim:
        ax.set_xlim(*xlim)
    ax.legend(fontsize=7)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_wigner(field: WignerField, path, title: str = "", xlim=None, plim=None) -> Path:
    """Top view of f(x, p) on a colour scale symmetric about zero."""
    g = field.grid
    scale = float(np.abs(field.values).max()) or 1e-300
    fig, ax = plt.subplots(figsize=(7, 3.6))
    im = ax.imshow(field.values.T, origin="lower", aspect="auto", cmap="RdBu_r",
                   vmin=-scale, vmax=scale, extent=(g.x_min, g.x_max, g.p_min, g.p_max))
    fig.colorbar(im, ax=ax, label="f")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.grid(False)
    if xlim:
        ax.set_xlim(*xlim)
    if plim:
        ax.set_ylim(*plim)
    ax.set_title(title or f"t = {field.time:g}")
    return _save(fig, path)


def plot_transmission(rows: Sequence[dict], path, title: str = "") -> Path:
    """T against E_K, one curve per kernel label."""
    fig, ax = plt.subplots()
    labels = []
    for r in rows:
        if r["kernel"] not in labels:
            labels.append(r["kernel"])
    for label in labels:
        pts = sorted((r["E_K"], r["T"]) for r in rows if r["kernel"] == label and np.isfinite(r["T"]))
        if pts:
            e, tv = zip(*pts)
            ax.plot(e, tv, marker="o", ms=3, label=label)
    ax.set_xlabel("E_K")
    ax.set_ylabel("T")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_width_profiles(profiles: Mapping[float, tuple[np.ndarray, np.ndarray]], path,
                        xlim=(-40.0, 40.0)) -> Path:
    """Final densities near the barrier, one curve per barrier width a."""
    fig, ax = plt.subplots()
    for a in sorted(profiles):
        x, n = profiles[a]
        ax.plot(x, n, lw=1, label=f"a={a:g}")
    ax.set_xlim(*xlim)
    ax.set_xlabel("x")
    ax.set_ylabel("n(x)")
    ax.legend()
    return _save(fig, path)
