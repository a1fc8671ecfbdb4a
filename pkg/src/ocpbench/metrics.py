"""Evaluation protocol: coverage/size reports, rolling series, frontiers, tracking.

Set size is the interval width ``2 * b_t``.  Size quantiles are
nearest-rank (no interpolation) with infinite values sorted above every
finite value, so a quantile is infinite exactly when the corresponding
upper tail fraction of rounds is infinite.  Rolling windows are trailing.
"""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bounds import BoundVerdict, check_bound
from .pinball import Trace, pinball_regret, validate_alpha

__all__ = [
    "MetricsReport",
    "compute_metrics",
    "rolling_local",
    "ParetoPoint",
    "pareto_frontier",
    "TrackingPoint",
    "target_tracking",
    "width_convergence_check",
    "SIZE_STATS",
]

DEFAULT_BURN_IN = 50
SIZE_STATS = ("mean", "median", "q75")


@dataclass(frozen=True)
class MetricsReport:
    """Headline metrics of one run after burn-in."""

    marginal_coverage: float
    miscov: float
    longest_error_run: int
    rounds_used: int
    mean_size: float
    median_size: float
    q75_size: float
    q90_size: float
    q95_size: float

    def size_stat(self, stat: str) -> float:
        if stat not in SIZE_STATS:
            raise ValueError(f"size statistic must be one of {SIZE_STATS}, got {stat!r}")
        return getattr(self, f"{stat}_size")


def _nearest_rank(sorted_values: np.ndarray, p: float) -> float:
    n = len(sorted_values)
    rank = max(1, math.ceil(p * n))
    return float(sorted_values[min(rank, n) - 1])


def _longest_run(miss: np.ndarray) -> int:
    longest = current = 0
    for m in miss:
        current = current + 1 if m else 0
        if current > longest:
            longest = current
    return longest


def compute_metrics(trace: Trace, burn_in: int, alpha: float) -> MetricsReport:
    """Aggregate a trace into a report, discarding the first ``burn_in`` rounds."""
    alpha = validate_alpha(alpha)
    if burn_in < 0:
        raise ValueError(f"burn-in must be >= 0, got {burn_in}")
    if burn_in >= len(trace):
        raise ValueError(f"burn-in {burn_in} leaves no rounds of a length-{len(trace)} trace")
    covered = trace.covered[burn_in:]
    sizes = 2.0 * trace.radii[burn_in:]
    coverage = float(covered.mean())
    sizes_sorted = np.sort(sizes)  # inf sorts above all finite values
    return MetricsReport(
        marginal_coverage=coverage,
        miscov=abs(coverage - (1.0 - alpha)),
        longest_error_run=_longest_run(~covered),
        rounds_used=int(covered.size),
        mean_size=float(sizes.mean()),
        median_size=_nearest_rank(sizes_sorted, 0.50),
        q75_size=_nearest_rank(sizes_sorted, 0.75),
        q90_size=_nearest_rank(sizes_sorted, 0.90),
        q95_size=_nearest_rank(sizes_sorted, 0.95),
    )


def rolling_local(trace: Trace, window: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Trailing-window local coverage and local width, emitted from round ``window`` on.

    Returns two arrays of length ``len(trace) - window + 1``; a window
    containing an infinite radius has infinite local width.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > len(trace):
        raise ValueError(f"window {window} exceeds trace length {len(trace)}")
    covered = trace.covered.astype(float)
    widths = 2.0 * trace.radii
    from numpy.lib.stride_tricks import sliding_window_view

    coverage_series = sliding_window_view(covered, window).mean(axis=1)
    width_series = sliding_window_view(widths, window).mean(axis=1)
    return coverage_series, width_series


@dataclass(frozen=True)
class ParetoPoint:
    """One (predictor, target level) cell of a frontier sweep, averaged across seeds."""

    predictor_id: str
    target_alpha: float
    realized_coverage: float
    size_stat: float
    se_coverage: float
    se_size: float


def _mean_se(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if np.isinf(arr).any():
        return math.inf, 0.0
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, se


RunGrid = Mapping[tuple[str, float, int], Trace]


def pareto_frontier(
    runs: RunGrid, size_stat: str = "mean", burn_in: int = DEFAULT_BURN_IN
) -> list[ParetoPoint]:
    """Coverage/size frontier points per (predictor, alpha), averaged across seeds.

    Points with all-infinite sizes are emitted, not dropped.  Output is
    sorted by predictor then realized coverage.
    """
    if size_stat not in SIZE_STATS:
        raise ValueError(f"size statistic must be one of {SIZE_STATS}, got {size_stat!r}")
    cells: dict[tuple[str, float], list[Trace]] = defaultdict(list)
    for (predictor_id, alpha, _seed), trace in runs.items():
        cells[(predictor_id, alpha)].append(trace)
    points = []
    for (predictor_id, alpha), traces in cells.items():
        reports = [compute_metrics(t, burn_in, alpha) for t in traces]
        cov, se_cov = _mean_se([r.marginal_coverage for r in reports])
        size, se_size = _mean_se([r.size_stat(size_stat) for r in reports])
        points.append(
            ParetoPoint(
                predictor_id=predictor_id,
                target_alpha=alpha,
                realized_coverage=cov,
                size_stat=size,
                se_coverage=se_cov,
                se_size=se_size,
            )
        )
    points.sort(key=lambda p: (p.predictor_id, p.realized_coverage))
    _warn_if_coverage_not_monotone(points)
    return points


def _warn_if_coverage_not_monotone(points: list[ParetoPoint]) -> None:
    """Realized coverage should fall as the target level rises; this is an
    empirical tendency, so violations only warn."""
    by_predictor: dict[str, list[ParetoPoint]] = defaultdict(list)
    for p in points:
        by_predictor[p.predictor_id].append(p)
    for predictor_id, pts in by_predictor.items():
        pts = sorted(pts, key=lambda p: p.target_alpha)
        for prev, cur in zip(pts, pts[1:]):
            if cur.realized_coverage > prev.realized_coverage + 1e-9:
                warnings.warn(
                    f"{predictor_id}: realized coverage rose from "
                    f"{prev.realized_coverage:.4f} to {cur.realized_coverage:.4f} "
                    f"as the target level rose from {prev.target_alpha:.4f} to "
                    f"{cur.target_alpha:.4f}",
                    stacklevel=3,
                )
                break


@dataclass(frozen=True)
class TrackingPoint:
    """Realized vs target coverage for one (predictor, alpha) cell."""

    predictor_id: str
    target_alpha: float
    target_coverage: float
    realized_coverage: float
    within_band: bool


def target_tracking(
    runs: RunGrid, burn_in: int = DEFAULT_BURN_IN, band: float = 0.03
) -> list[TrackingPoint]:
    """Per (predictor, alpha): seed-averaged realized coverage against ``1 - alpha``."""
    cells: dict[tuple[str, float], list[float]] = defaultdict(list)
    for (predictor_id, alpha, _seed), trace in runs.items():
        cells[(predictor_id, alpha)].append(
            compute_metrics(trace, burn_in, alpha).marginal_coverage
        )
    points = []
    for (predictor_id, alpha), coverages in cells.items():
        realized = float(np.mean(coverages))
        target = 1.0 - alpha
        points.append(
            TrackingPoint(
                predictor_id=predictor_id,
                target_alpha=alpha,
                target_coverage=target,
                realized_coverage=realized,
                within_band=abs(realized - target) <= band,
            )
        )
    points.sort(key=lambda p: (p.predictor_id, p.target_alpha))
    return points


def width_convergence_check(
    trace: Trace, oracle_quantile: float, kappa: float, regret_budget: float
) -> BoundVerdict:
    """Check ``(mean radius - oracle quantile)**2 <= (2/kappa) * regret / T``.

    ``regret_budget`` is the caller-measured pinball regret of the trace
    against the constant oracle radius (see :func:`ocpbench.pinball.pinball_regret`),
    which makes the check free of distributional assumptions.
    """
    if not kappa > 0:
        raise ValueError(f"density floor kappa must be positive, got {kappa!r}")
    radii = trace.radii
    if np.isinf(radii).any():
        raise ValueError("width convergence is undefined for infinite radii")
    mean_radius = float(radii.mean())
    observed = (mean_radius - oracle_quantile) ** 2
    bound = (2.0 / kappa) * regret_budget / len(trace)
    return check_bound("width_convergence", observed, bound)
