"""Figures written next to the delimited certification output."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from majorcert.harness.metrics import MetricsReport  # noqa: E402

METHOD_COLORS = {"majority": "#4c72b0", "majority_invariant": "#dd8452"}


def plot_metrics(report: MetricsReport, path: str | Path, title: str = "") -> Path:
    """Clean vs certified robust accuracy, the latter split by certification method."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    total = report.total or 1
    ax.bar(0, report.clean_correct / total, color="#8c8c8c", width=0.6, label="clean")
    bottom = 0.0
    for method, n in report.by_method.items():
        share = n / total
        ax.bar(1, share, bottom=bottom, width=0.6, color=METHOD_COLORS.get(method),
               label=f"certified ({method.replace('_', ' ')})")
        bottom += share
    ax.set_xticks([0, 1], ["clean accuracy", "certified robust\naccuracy"])
    ax.set_ylim(0, 1)
    ax.set_ylabel("fraction of samples")
    ax.set_title(title or f"{report.total} samples")
    for x, v in ((0, report.clean_accuracy), (1, report.certified_robust_accuracy)):
        ax.text(x, float(v) + 0.02, f"{float(v):.1%}", ha="center")
    ax.legend(loc="lower right", fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
