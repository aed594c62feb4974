"""Figure rendering for recorded trajectories and sweep tables."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_trajectory_figure(traj, path, title: str | None = None) -> None:
    """Two stacked panels: coupling strength on top, synchronization error
    below (log scale when the error stays positive).  The file format
    follows the path suffix; the CLI passes ``.svg``."""
    fig, (ax_c, ax_e) = plt.subplots(2, 1, figsize=(7.0, 5.4), sharex=True)
    ax_c.plot(traj.times, traj.c_series, color="tab:blue")
    ax_c.set_ylabel("c(t)")
    ax_c.grid(True, alpha=0.3)

    es = np.asarray(traj.e_series)
    if (es > 0).all():
        ax_e.semilogy(traj.times, es, color="tab:red")
    else:
        ax_e.plot(traj.times, es, color="tab:red")
    ax_e.set_xlabel("t")
    ax_e.set_ylabel("E(t)")
    ax_e.grid(True, alpha=0.3)

    if title:
        ax_c.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_sweep_figure(alphas, c_finals, path, title: str | None = None) -> None:
    """Terminal coupling strength against the adaptation gain."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(alphas, c_finals, marker="o", color="tab:blue")
    ax.set_xscale("log")
    ax.set_xlabel("adaptation gain")
    ax.set_ylabel("terminal c")
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
