"""Figure rendering for the report paths.

Figures are written to files next to the delimited tables (no interactive
display); rendering is skipped cleanly when a curve has no defined points.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import SweepRow


def _save(fig, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_precision_recall(rows: Sequence[SweepRow], path: str | Path,
                          label: str = "detector") -> bool:
    """Precision-recall curve over the threshold sweep, with the fraction of
    false positives falling on intermediate boundaries on a second axis.
    Returns False when no point on the curve is defined."""
    pts = [(r.metric.recall, r.metric.precision, r.threshold,
            r.fp_intermediate_fraction)
           for r in rows if r.metric.recall is not None
           and r.metric.precision is not None]
    if not pts:
        return False
    fig, ax = plt.subplots(figsize=(6, 4.5))
    recall = [p[0] for p in pts]
    precision = [p[1] for p in pts]
    ax.plot(recall, precision, "o-", ms=3, label=label)
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)

    frac = [(p[0], p[3]) for p in pts if p[3] is not None]
    if frac:
        ax2 = ax.twinx()
        ax2.plot([f[0] for f in frac], [f[1] for f in frac], "s--", ms=3,
                 color="tab:orange", alpha=0.7,
                 label="fp intermediate fraction")
        ax2.set_ylabel("fraction of fp on intermediate boundaries")
        ax2.set_ylim(0, 1.02)
        lines, labels = ax.get_legend_handles_labels()
        lines2, labels2 = ax2.get_legend_handles_labels()
        ax.legend(lines + lines2, labels + labels2, loc="lower left")
    else:
        ax.legend(loc="lower left")
    _save(fig, path)
    return True


def plot_purity_coverage(rows: Sequence[SweepRow], path: str | Path,
                         label: str = "detector") -> bool:
    """Purity-coverage curve over the threshold sweep."""
    pts = [(r.coverage, r.purity) for r in rows
           if r.coverage is not None and r.purity is not None]
    if not pts:
        return False
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", ms=3, label=label)
    ax.set_xlabel("coverage")
    ax.set_ylabel("purity")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower left")
    _save(fig, path)
    return True


def plot_speaker_points(points: dict[str, tuple[float | None, float | None]],
                        path: str | Path) -> bool:
    """Per-speaker (recall, precision) scatter; the 'all' entry, when
    present, is emphasized."""
    defined = {k: v for k, v in points.items()
               if v[0] is not None and v[1] is not None}
    if not defined:
        return False
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for name, (recall, precision) in sorted(defined.items()):
        if name == "all":
            ax.plot([recall], [precision], "k*", ms=14, label="all")
        else:
            ax.plot([recall], [precision], "o", ms=5)
            ax.annotate(name, (recall, precision), fontsize=7,
                        xytext=(3, 3), textcoords="offset points")
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    if "all" in defined:
        ax.legend(loc="lower left")
    _save(fig, path)
    return True


__all__ = ["plot_precision_recall", "plot_purity_coverage",
           "plot_speaker_points"]
