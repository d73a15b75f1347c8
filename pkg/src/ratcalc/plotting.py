"""Figure builders for the CLI's SVG output.

Rendering is pinned to the Agg backend with a fixed hash salt and no
date metadata, so identical inputs produce byte-identical SVG files.
"""

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ratcalc"

import matplotlib.pyplot as plt
import numpy as np

from .lemniscate import level_chains

_CYCLE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def lemniscate_figure(r, levels, window, resolution=400):
    """Level curves of |r| with numerator roots as dots and poles as
    open circles."""
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    for i, rho in enumerate(levels):
        color = _CYCLE[i % len(_CYCLE)]
        label = "|r| = %g" % rho
        for verts, is_closed in level_chains(r, rho, window,
                                             resolution=resolution):
            pts = np.asarray(verts, dtype=complex)
            if is_closed and len(pts):
                pts = np.append(pts, pts[:1])
            ax.plot(pts.real, pts.imag, lw=1.1, color=color, label=label)
            label = None
    lam = np.asarray(r.lambdas)
    ax.plot(lam.real, lam.imag, "k.", ms=7, label="zeros")
    if r.q.degree > 0:
        mu = np.asarray(r.q.roots())
        ax.plot(mu.real, mu.imag, "o", ms=7, mfc="none", mec="k",
                label="poles")
    ax.set_xlim(window.xmin, window.xmax)
    ax.set_ylim(window.ymin, window.ymax)
    ax.set_aspect("equal")
    ax.grid(True, lw=0.3, alpha=0.5)
    ax.legend(loc="upper right", fontsize=8)
    return fig


def sweep_figure(result):
    """Ratio landscape of a two-parameter segment sweep with the best
    pair marked."""
    rows = result.rows
    a_vals = sorted({row[0] for row in rows})
    b_vals = sorted({row[1] for row in rows})
    grid = np.full((len(b_vals), len(a_vals)), np.nan)
    ai = {a: i for i, a in enumerate(a_vals)}
    bi = {b: i for i, b in enumerate(b_vals)}
    for a, b, _level, _x0, _y0, ratio in rows:
        grid[bi[b], ai[a]] = ratio
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    im = ax.imshow(grid, origin="lower", aspect="auto",
                   extent=(min(a_vals), max(a_vals),
                           min(b_vals), max(b_vals)),
                   cmap="viridis")
    fig.colorbar(im, ax=ax, label="steepest segment slope")
    if np.isfinite(result.ratio):
        ax.plot([result.a], [result.b], "r*", ms=12,
                label="best: %.1f deg" % result.angle_deg)
        ax.legend(loc="lower right", fontsize=8)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    return fig


def save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
