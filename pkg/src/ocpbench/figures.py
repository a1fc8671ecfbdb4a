"""Matplotlib rendering of the report figures, written next to the delimited output.

All functions save PNG files and never open a window (Agg backend).
Infinite widths are masked to gaps in the line plots and annotated in the
legend; frontier points with infinite size are dropped from the axes (they
remain in the CSV, which is the data of record).
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import ParetoPoint, TrackingPoint, rolling_local
from .pinball import Trace

__all__ = ["save_local_panels", "save_pareto_figure", "save_tracking_figure"]


def _masked(series: np.ndarray) -> np.ndarray:
    return np.where(np.isinf(series), np.nan, series)


def save_local_panels(
    traces: Mapping[str, Trace], alpha: float, window: int, path: str
) -> None:
    """Rolling local coverage (top) and local width (bottom), one line per run."""
    fig, (ax_cov, ax_width) = plt.subplots(2, 1, figsize=(9, 6), sharex=True)
    for label, trace in traces.items():
        if window > len(trace):
            continue
        coverage, width = rolling_local(trace, window)
        rounds = np.arange(window, len(trace) + 1)
        n_inf = int(np.isinf(width).sum())
        ax_cov.plot(rounds, coverage, label=label, linewidth=1.0)
        width_label = label if n_inf == 0 else f"{label} ({n_inf} inf windows)"
        ax_width.plot(rounds, _masked(width), label=width_label, linewidth=1.0)
    ax_cov.axhline(1.0 - alpha, color="black", linestyle="--", linewidth=0.8)
    ax_cov.set_ylabel(f"local coverage (window {window})")
    ax_cov.legend(loc="lower right", fontsize=8)
    ax_width.set_ylabel("local width")
    ax_width.set_xlabel("round")
    ax_width.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_pareto_figure(points: Sequence[ParetoPoint], stat: str, path: str) -> None:
    """Realized coverage vs size statistic with standard-error bars, per predictor."""
    fig, ax = plt.subplots(figsize=(7, 5))
    by_predictor: dict[str, list[ParetoPoint]] = defaultdict(list)
    for p in points:
        by_predictor[p.predictor_id].append(p)
    for predictor_id, pts in sorted(by_predictor.items()):
        pts = sorted(pts, key=lambda p: p.realized_coverage)
        finite = [p for p in pts if math.isfinite(p.size_stat)]
        dropped = len(pts) - len(finite)
        if not finite:
            continue
        label = predictor_id if dropped == 0 else f"{predictor_id} ({dropped} inf dropped)"
        ax.errorbar(
            [p.realized_coverage for p in finite],
            [p.size_stat for p in finite],
            xerr=[p.se_coverage for p in finite],
            yerr=[p.se_size for p in finite],
            marker="o",
            markersize=3,
            linewidth=1.0,
            capsize=2,
            label=label,
        )
    ax.set_xlabel("realized coverage")
    ax.set_ylabel(f"{stat} set size")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tracking_figure(points: Sequence[TrackingPoint], band: float, path: str) -> None:
    """Realized vs target coverage with the tolerance band around the diagonal."""
    fig, ax = plt.subplots(figsize=(6, 5))
    targets = sorted({p.target_coverage for p in points})
    if targets:
        lo, hi = min(targets), max(targets)
        diag = np.linspace(lo, hi, 50)
        ax.plot(diag, diag, color="black", linewidth=0.8)
        ax.plot(diag, diag + band, color="black", linestyle="--", linewidth=0.6)
        ax.plot(diag, diag - band, color="black", linestyle="--", linewidth=0.6)
    by_predictor: dict[str, list[TrackingPoint]] = defaultdict(list)
    for p in points:
        by_predictor[p.predictor_id].append(p)
    for predictor_id, pts in sorted(by_predictor.items()):
        pts = sorted(pts, key=lambda p: p.target_coverage)
        ax.plot(
            [p.target_coverage for p in pts],
            [p.realized_coverage for p in pts],
            marker="o",
            markersize=3,
            linewidth=1.0,
            label=predictor_id,
        )
    ax.set_xlabel("target coverage")
    ax.set_ylabel("realized coverage")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
