"""Figures for bench reports and embedding previews.

Uses the object-oriented Figure API directly so no GUI backend is touched.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .bench import BenchReportRow
from .image_io import GrayImage
from .metrics import Mark

STYLE = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
LINE_COLOR = "Navy"
THRESH_COLOR = "Crimson"
PNG_METADATA = {"Software": None}


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, metadata=PNG_METADATA)
    return path


def jpeg_sweep_figure(rows: Sequence[BenchReportRow], threshold: float) -> Figure:
    """Correlation against JPEG quality factor, one line per image."""
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(5.0, 3.2), layout="constrained")
        ax = fig.add_subplot()
        by_image: dict[str, list[tuple[int, float]]] = {}
        for row in rows:
            if row.attack.kind != "jpeg":
                continue
            corr = 0.0 if row.correlation is None else row.correlation
            by_image.setdefault(row.image, []).append((row.attack.params["quality"], corr))
        for i, (name, pts) in enumerate(sorted(by_image.items())):
            pts.sort()
            q, c = zip(*pts)
            ax.plot(q, c, marker="o", ms=3.5, lw=1.0, label=name,
                    color=LINE_COLOR if i == 0 else None)
        ax.axhline(threshold, color=THRESH_COLOR, lw=0.8, ls="--", label=f"threshold {threshold:g}")
        ax.set_xlabel("JPEG quality factor (%)")
        ax.set_ylabel("correlation")
        ax.set_ylim(-0.05, 1.05)
        ax.set_xlim(0, 105)
        ax.legend(loc="lower right", frameon=False)
        return fig


def attack_bar_figure(rows: Sequence[BenchReportRow], threshold: float) -> Figure:
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(6.0, 3.2), layout="constrained")
        ax = fig.add_subplot()
        labels = [r.attack.kind if not r.attack.describe() else f"{r.attack.kind}\n{r.attack.describe()}"
                  for r in rows]
        values = [0.0 if r.correlation is None else r.correlation for r in rows]
        colors = [LINE_COLOR if r.detected else "0.6" for r in rows]
        x = np.arange(len(rows))
        ax.bar(x, values, color=colors, width=0.7)
        ax.axhline(threshold, color=THRESH_COLOR, lw=0.8, ls="--")
        ax.set_xticks(x, labels, rotation=90, fontsize=6)
        ax.set_ylabel("correlation")
        ax.set_ylim(min(-0.05, min(values, default=0) - 0.05), 1.05)
        return fig


def mark_grid_figure(reference: Mark, rows: Sequence[BenchReportRow]) -> Figure:
    """Reference mark next to the mark extracted after each attack."""
    panels = [("reference", reference)] + [
        (f"{r.attack.kind} {r.attack.describe()}".strip(), r.extracted) for r in rows
    ]
    ncols = min(6, len(panels))
    nrows = math.ceil(len(panels) / ncols)
    fig = Figure(figsize=(1.3 * ncols, 1.45 * nrows), layout="constrained")
    for i, (title, m) in enumerate(panels):
        ax = fig.add_subplot(nrows, ncols, i + 1)
        ax.imshow(m.as_image(), cmap="gray_r", vmin=0, vmax=1, interpolation="nearest")
        ax.set_title(title, fontsize=5)
        ax.set_axis_off()
    return fig


def embedding_figure(original: GrayImage, watermarked: GrayImage) -> Figure:
    """Original, watermarked, and amplified absolute difference."""
    diff = np.abs(original.pixels.astype(np.int16) - watermarked.pixels.astype(np.int16))
    fig = Figure(figsize=(9.0, 3.3), layout="constrained")
    panels = [
        ("original", original.pixels, 255),
        ("watermarked", watermarked.pixels, 255),
        (f"|difference| (max {int(diff.max())})", diff, max(1, int(diff.max()))),
    ]
    for i, (title, px, vmax) in enumerate(panels):
        ax = fig.add_subplot(1, 3, i + 1)
        ax.imshow(px, cmap="gray", vmin=0, vmax=vmax, interpolation="nearest")
        ax.set_title(title, fontsize=9)
        ax.set_axis_off()
    return fig


def render_bench_figures(
    rows: Sequence[BenchReportRow], reference: Mark, out_dir: str | Path, threshold: float
) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    if any(r.attack.kind == "jpeg" for r in rows):
        written.append(_save(jpeg_sweep_figure(rows, threshold), out_dir / "jpeg_sweep.png"))
    written.append(_save(attack_bar_figure(rows, threshold), out_dir / "attack_correlations.png"))
    written.append(_save(mark_grid_figure(reference, rows), out_dir / "extracted_marks.png"))
    return written


def render_embedding_figure(original: GrayImage, watermarked: GrayImage, path: str | Path) -> Path:
    return _save(embedding_figure(original, watermarked), path)
