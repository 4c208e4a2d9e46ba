"""Report figures, rendered off-screen to image files."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .complexity import METRICS  # noqa: E402

logger = logging.getLogger(__name__)

__all__ = ["plot_readability", "plot_complexity_hist", "plot_cooccurrence", "render_report_figures"]


def plot_readability(summary: Mapping[str, Mapping[str, float]], path) -> Path:
    names = list(summary)
    means = [summary[n]["mean"] for n in names]
    stds = [summary[n]["std"] for n in names]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(names, means, yerr=stds, capsize=3, color="#4c72b0")
    ax.axhline(0, color="black", linewidth=0.6)
    ax.set_ylabel("mean score (±1 sd)")
    ax.set_title("Readability of statements")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_complexity_hist(totals: List[float], path, bins: int = 20) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.hist(totals, bins=bins, color="#55a868", edgecolor="white")
    ax.set_xlabel("total complexity C(s)")
    ax.set_ylabel("statements")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_cooccurrence(matrix: Mapping[str, Mapping[str, int]], path) -> Path:
    grid = [[matrix[a][b] for b in METRICS] for a in METRICS]
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(grid, cmap="Blues")
    ax.set_xticks(range(len(METRICS)), METRICS)
    ax.set_yticks(range(len(METRICS)), METRICS)
    peak = max((v for row in grid for v in row), default=0)
    for i, row in enumerate(grid):
        for j, v in enumerate(row):
            ax.text(j, i, str(v), ha="center", va="center",
                    color="white" if peak and v > peak / 2 else "black", fontsize=8)
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title("Metric co-occurrence")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_report_figures(report, profiles, outdir) -> Dict[str, str]:
    """Write the three report figures as PNG files; returns name -> path."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    out = {}
    if report.readability:
        out["readability"] = str(plot_readability(report.readability, outdir / "readability.png"))
    out["complexity"] = str(plot_complexity_hist([p.total for p in profiles.values()], outdir / "complexity_hist.png"))
    out["cooccurrence"] = str(plot_cooccurrence(report.cooccurrence, outdir / "cooccurrence.png"))
    for name, p in out.items():
        logger.info("wrote %s figure to %s", name, p)
    return out
