"""Figures for sweep results.

Rendering uses the Agg/SVG backends only. The SVG hash salt and metadata are
pinned so identical data give byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .tables import atomic_path  # noqa: E402

RC = {
    "svg.hashsalt": "pmdigraph",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def plot_sweeps(trajectories, path, title: str | None = None):
    """Plot ``min_r H(t; r)`` against ``t`` for one or more sweeps and save to ``path``.

    The format follows the suffix (``.svg``, ``.png``, ``.pdf``).
    """
    path = Path(path)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for traj in trajectories:
            ax.plot(traj.t, traj.H, lw=1.2, label=f"m = {traj.m}")
        ax.axhline(0.0, color="0.5", lw=0.8, ls="--")
        ax.set_xlabel("t")
        ax.set_ylabel(r"$\min_r H_{n,m}(t; r)$")
        if title is None and trajectories:
            title = f"n = {trajectories[0].n}"
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        fmt = path.suffix.lstrip(".") or "svg"
        with atomic_path(path) as tmp:
            fig.savefig(tmp, format=fmt, metadata=_metadata(fmt))
        plt.close(fig)
    return path


def _metadata(fmt: str):
    if fmt == "svg":
        return {"Date": None, "Creator": "pmdigraph"}
    if fmt == "pdf":
        return {"CreationDate": None, "Creator": "pmdigraph"}
    if fmt == "png":
        return {"Software": "pmdigraph"}
    return None
