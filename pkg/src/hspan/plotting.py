"""Static SVG figures: slit images and s(t) heat maps.

SVG output is byte-stable: fixed hash salt, no date metadata.
"""
from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "hspan"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def plot_slits(pair, path, samples=512):
    """Boundary images under P, Q and H, one panel each."""
    from .bie import resample
    from .principal import build_H, build_slit_map

    plt = _pyplot()
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.6))
    maps = (("P (circular)", build_slit_map(pair, "circular")),
            ("Q (radial)", build_slit_map(pair, "radial")),
            ("H", build_H(pair)))
    for ax, (title, m) in zip(axes, maps):
        w = np.exp(resample(m.boundary_log(), samples))
        for j, row in enumerate(w):
            ax.plot(row.real, row.imag, lw=1.2, label=f"C{j}")
        ax.set_title(title)
        ax.set_aspect("equal", adjustable="datalim")
        ax.axhline(0, color="0.8", lw=0.5)
        ax.axvline(0, color="0.8", lw=0.5)
    axes[0].legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_heatmap(xs, ys, values, path, title="span s(t)", xlabel="Re t", ylabel="Im t"):
    """Scatter-style heat map of values at scattered grid points."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.8, 4))
    sc = ax.scatter(xs, ys, c=values, s=120, marker="s", cmap="viridis")
    fig.colorbar(sc, ax=ax)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.set_aspect("equal")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
