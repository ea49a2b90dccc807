"""Figure rendering for the report paths (matplotlib, file output only)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def save_trajectory_figure(rows, path):
    """Residual load and active-link count along a simulated cascade.

    rows: (t, active_count, failed_links, residual) tuples from `simulate`.
    """
    ts = [r[0] for r in rows]
    active = [r[1] for r in rows]
    residual = [r[3] for r in rows]
    fig, ax1 = plt.subplots(figsize=(6.0, 3.6))
    ax1.step(ts, residual, where="post", color="tab:red", label="residual load")
    ax1.set_xlabel("stage")
    ax1.set_ylabel("residual load", color="tab:red")
    ax2 = ax1.twinx()
    ax2.step(ts, active, where="post", color="tab:blue", label="active links")
    ax2.set_ylabel("active links", color="tab:blue")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_value_figure(per_depth, path, label="optimal residual load"):
    """Residual load against the control horizon."""
    ns = sorted(per_depth)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(ns, [per_depth[n] for n in ns], marker="o")
    ax.set_xlabel("horizon N")
    ax.set_ylabel(label)
    ax.set_xticks(ns)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_table_figure(etas, horizons, cells, optimal, path):
    """Heatmap of the residual-load table plus the per-eta curves."""
    M = np.array(cells)  # rows: horizons, cols: etas
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 3.8))
    im = ax1.imshow(M, aspect="auto", origin="upper", cmap="viridis")
    ax1.set_xticks(range(len(etas)), [f"{e:g}" for e in etas])
    ax1.set_yticks(range(len(horizons)), [str(n) for n in horizons])
    ax1.set_xlabel("eta")
    ax1.set_ylabel("N")
    fig.colorbar(im, ax=ax1, label="residual load")
    for j, e in enumerate(etas):
        ax2.plot(horizons, M[:, j], alpha=0.55, label=f"eta={e:g}")
    ax2.plot(horizons, optimal, "k--", lw=2, label="optimal")
    ax2.set_xlabel("horizon N")
    ax2.set_ylabel("residual load")
    ax2.set_xticks(list(horizons))
    ax2.legend(fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
