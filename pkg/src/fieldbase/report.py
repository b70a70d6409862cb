"""Report rendering: delimited text plus figures, written side by side.

matplotlib is imported here and nowhere else, with the Agg backend forced
so report generation works headless.
"""

from __future__ import annotations

import csv
import os

from .model import format_discriminant
from .query import SearchRequest, SearchResult
from .service import class_column

__all__ = ["write_report"]

TSV_NAME = "results.tsv"
FIGURE_NAME = "rd_by_degree.png"


def _tsv_rows(result: SearchResult, display: str):
    yield ["degree", "rd", "grd", "disc", "absdisc", "h", "group", "polynomial"]
    for r in result.rows:
        h = class_column(r, display)
        yield [
            str(r.degree),
            r.rd().decimal2(),
            r.grd.decimal2() if r.grd is not None else "",
            format_discriminant(r.disc),
            str(r.absdisc),
            h if h is not None else "",
            r.group.label,
            r.poly_text(),
        ]


def _scatter(result: SearchResult, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    rd_pts = [(r.degree, float(r.rd().decimal2())) for r in result.rows]
    grd_pts = [
        (r.degree, float(r.grd.decimal2()))
        for r in result.rows
        if r.grd is not None
    ]
    if rd_pts:
        ax.scatter(*zip(*rd_pts), marker="o", label="rd", alpha=0.7)
    if grd_pts:
        ax.scatter(*zip(*grd_pts), marker="x", label="grd", alpha=0.7)
    ax.set_xlabel("degree")
    ax.set_ylabel("root discriminant")
    title = "proven complete" if result.complete else "completeness not proven"
    ax.set_title(f"{result.total} fields ({title})")
    if rd_pts or grd_pts:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(result: SearchResult, request: SearchRequest, out_dir: str) -> list[str]:
    """Write results.tsv and the rd/grd scatter; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    tsv_path = os.path.join(out_dir, TSV_NAME)
    with open(tsv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerows(_tsv_rows(result, request.class_display))
    figure_path = os.path.join(out_dir, FIGURE_NAME)
    _scatter(result, figure_path)
    return [tsv_path, figure_path]
