"""Matplotlib figures written next to the CSV output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from .analytic import ErrorReport  # noqa: E402
from .field import Box  # noqa: E402
from .levelset import Contour  # noqa: E402

plt.rcParams.update(
    {
        "font.size": 9,
        "axes.linewidth": 0.8,
        "lines.linewidth": 1.0,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
    }
)


def plot_contour_panels(snapshots: Sequence[tuple[float, Contour]], box: Box, path, title: str = "") -> Path:
    """One square panel per time, in the style of the level-set figures."""
    n = max(len(snapshots), 1)
    fig, axes = plt.subplots(1, n, figsize=(2.6 * n, 2.8), squeeze=False)
    for ax, (t, contour) in zip(axes[0], snapshots):
        for poly in contour.polylines:
            if Contour.is_closed(poly):
                # A closed patch has no line caps at the seam.
                ax.add_patch(Polygon(poly[:-1], closed=True, fill=False, edgecolor="k"))
            else:
                ax.plot(poly[:, 0], poly[:, 1], color="k")
        ax.set_xlim(box.x0, box.x1)
        ax.set_ylim(box.y0, box.y1)
        ax.set_aspect("equal")
        ax.set_title(f"t = {t:.2f}")
        ax.tick_params(direction="in")
    if title:
        fig.suptitle(title)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_error_history(report: ErrorReport, path) -> Path:
    t = np.array([r[1] for r in report.per_step])
    fig, ax = plt.subplots(figsize=(4.0, 2.8))
    ax.plot(t, [r[2] for r in report.per_step], "o-", ms=2.5, label=r"$l_\infty$")
    ax.plot(t, [r[3] for r in report.per_step], "s-", ms=2.5, label=r"$h^2$-scaled $l_1$")
    ax.set_xlabel("t")
    ax.set_ylabel("error")
    ax.legend(frameon=False)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_table(result, path) -> Path:
    """Computed sup errors against the swept parameter, with the reference values."""
    table = result.table
    x = [row.value for row in table.rows]
    fig, ax = plt.subplots(figsize=(4.0, 2.8))
    ax.plot(x, [r.sup_linf for r in result.reports], "o-", color="C0", label=r"$l_\infty$")
    ax.plot(x, [r.sup_l1 for r in result.reports], "s-", color="C1", label=r"$l_1$")
    ax.plot(x, [row.ref_linf for row in table.rows], "o--", color="C0", mfc="none", label=r"$l_\infty$ reference")
    ax.plot(x, [row.ref_l1 for row in table.rows], "s--", color="C1", mfc="none", label=r"$l_1$ reference")
    if table.param in ("h", "epsilon", "l0", "r0"):
        ax.set_xscale("log")
    ax.set_xlabel(table.param)
    ax.set_ylabel("sup error")
    ax.set_title(f"Table {table.number}")
    ax.legend(frameon=False, fontsize=7)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path
