"""PNG figures written next to the CSV output.

Uses the Agg canvas directly, so nothing depends on pyplot state or a display.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

# PNG text chunks would otherwise carry the matplotlib version.
_PNG_META = {"Software": None}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    return path


def plot_sensitivity(path, xs, d, design, bound, title="") -> Path:
    """Sensitivity function with the bound line; support points marked, weights on a second axis."""
    fig = Figure(figsize=(6.0, 3.6))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(xs, d, color="C0", lw=1.5, label="d(x)")
    ax.axhline(bound, color="0.3", ls="--", lw=1.0, label=f"bound = {bound}")
    ax.set_xlabel("x")
    ax.set_ylabel("sensitivity d(x)")
    ax.set_xlim(float(np.min(xs)), float(np.max(xs)))
    lo = min(0.0, float(np.min(d)))
    ax.set_ylim(lo, 1.1 * max(bound, float(np.max(d))))

    wax = ax.twinx()
    wax.vlines(design.points, 0.0, design.weights, color="C3", lw=2.0)
    wax.plot(design.points, design.weights, "o", color="C3", ms=4, label="design weight")
    wax.set_ylim(0.0, 1.0)
    wax.set_ylabel("weight")

    handles = ax.get_legend_handles_labels()
    whandles = wax.get_legend_handles_labels()
    ax.legend(handles[0] + whandles[0], handles[1] + whandles[1], loc="lower center", fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_losses(path, cells, title="") -> Path:
    """Computed against published losses, one marker per scored cell.

    Flagged (unscored) cells are left out so they do not stretch the axes.
    """
    numeric = [c for c in cells if c.in_scope and isinstance(c.computed, float)
               and isinstance(c.reference, float)]
    fig = Figure(figsize=(7.0, 3.8))
    ax = fig.add_subplot(1, 1, 1)
    if numeric:
        ref = np.array([c.reference for c in numeric])
        got = np.array([c.computed for c in numeric])
        top = 1.05 * float(max(ref.max(), got.max(), 1e-3))
        ax.plot([0.0, top], [0.0, top], color="0.6", lw=1.0)
        colors = ["C2" if c.passed else "C3" for c in numeric]
        ax.scatter(ref, got, c=colors, s=18, zorder=3)
        for c in numeric:
            if not c.passed:
                ax.annotate(c.label, (c.reference, c.computed), fontsize=6,
                            xytext=(3, 3), textcoords="offset points")
        ax.set_xlim(0.0, top)
        ax.set_ylim(0.0, top)
    ax.set_xlabel("published loss (%)")
    ax.set_ylabel("computed loss (%)")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)
