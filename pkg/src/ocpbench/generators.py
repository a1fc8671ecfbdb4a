"""Seeded synthetic score generators, a demonstration AR(3) forecaster, and CSV ingestion.

Every generator is a pure function of its config, including the seed: one
PCG64 stream (``numpy.random.default_rng``) per call, with draws made in a
fixed, documented order.  Golden values are therefore stable per seed for
this implementation, but are not expected to match other RNGs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "SinusoidConfig",
    "StationaryConfig",
    "QuadraticMixConfig",
    "IidConfig",
    "gen_sinusoid",
    "gen_stationary",
    "gen_quadratic_mix",
    "gen_iid",
    "iid_oracle_quantile",
    "Ar3Result",
    "ar3_scores",
    "CsvFormatError",
    "ingest_csv",
]


def _check_horizon(horizon: int) -> None:
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")


@dataclass(frozen=True)
class SinusoidConfig:
    """Sinusoidal score wave with additive Gaussian noise, clipped at zero."""

    period: float = 200.0
    magnitude: float = 10.0
    offset: float = 2.0
    noise_sd: float = 0.3
    horizon: int = 3000
    seed: int = 1

    def __post_init__(self) -> None:
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period!r}")
        if self.noise_sd < 0:
            raise ValueError(f"noise sd must be >= 0, got {self.noise_sd!r}")
        _check_horizon(self.horizon)


def gen_sinusoid(cfg: SinusoidConfig) -> np.ndarray:
    """``S_t = max(0, (sin(2 pi t / P) + 0.5) * magnitude + offset + eps_t)`` for t = 1..T."""
    rng = np.random.default_rng(cfg.seed)
    t = np.arange(1, cfg.horizon + 1, dtype=float)
    eps = rng.normal(0.0, cfg.noise_sd, cfg.horizon) if cfg.noise_sd > 0 else 0.0
    wave = (np.sin(2.0 * np.pi * t / cfg.period) + 0.5) * cfg.magnitude + cfg.offset
    return np.maximum(0.0, wave + eps)


@dataclass(frozen=True)
class StationaryConfig:
    """Constant baseline with sparse multiplicative spikes, widened by a rolling max."""

    baseline: float = 10.0
    spike_prob: float = 0.1
    exp_scale: float = 10.0
    window: int = 25
    horizon: int = 3000
    seed: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.spike_prob <= 1.0:
            raise ValueError(f"spike probability must be in [0, 1], got {self.spike_prob!r}")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        if self.exp_scale < 0:
            raise ValueError(f"exponential scale must be >= 0, got {self.exp_scale!r}")
        _check_horizon(self.horizon)


def _rolling_max_centered(values: np.ndarray, window: int) -> np.ndarray:
    """Centered rolling max, truncating the window at the sequence edges."""
    half = window // 2
    padded = np.pad(values, (half, half), constant_values=-np.inf)
    return sliding_window_view(padded, window).max(axis=1)


def _spiked(baseline: np.ndarray, cfg) -> np.ndarray:
    # Draw order: spike mask first, then magnitudes.
    rng = np.random.default_rng(cfg.seed)
    mask = rng.random(cfg.horizon) < cfg.spike_prob
    magnitude = (
        rng.exponential(cfg.exp_scale, cfg.horizon)
        if cfg.exp_scale > 0
        else np.zeros(cfg.horizon)
    )
    pre = baseline * (1.0 + mask * magnitude)
    return _rolling_max_centered(pre, cfg.window)


def gen_stationary(cfg: StationaryConfig) -> np.ndarray:
    """``S = rollmax(C * (1 + B_t E_t))`` with Bernoulli mask B and exponential bumps E."""
    baseline = np.full(cfg.horizon, float(cfg.baseline))
    return _spiked(baseline, cfg)


@dataclass(frozen=True)
class QuadraticMixConfig:
    """Quadratic trend from 0 to ``end_value`` with the same sparse-spike structure."""

    end_value: float = 20.0
    spike_prob: float = 0.1
    exp_scale: float = 10.0
    window: int = 25
    horizon: int = 3000
    seed: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.spike_prob <= 1.0:
            raise ValueError(f"spike probability must be in [0, 1], got {self.spike_prob!r}")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        if self.exp_scale < 0:
            raise ValueError(f"exponential scale must be >= 0, got {self.exp_scale!r}")
        _check_horizon(self.horizon)


def gen_quadratic_mix(cfg: QuadraticMixConfig) -> np.ndarray:
    """As :func:`gen_stationary` with baseline ``(end/T**2) * t**2``."""
    t = np.arange(1, cfg.horizon + 1, dtype=float)
    trend = cfg.end_value / cfg.horizon**2 * t**2
    return _spiked(trend, cfg)


@dataclass(frozen=True)
class IidConfig:
    """I.i.d. scores from a named distribution: ``uniform`` on (0,1) or ``exponential``."""

    distribution: str = "uniform"
    scale: float = 1.0
    horizon: int = 3000
    seed: int = 1

    def __post_init__(self) -> None:
        if self.distribution not in ("uniform", "exponential"):
            raise ValueError(
                f"distribution must be 'uniform' or 'exponential', got {self.distribution!r}"
            )
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")
        _check_horizon(self.horizon)


def gen_iid(cfg: IidConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    if cfg.distribution == "uniform":
        return rng.random(cfg.horizon)
    return rng.exponential(cfg.scale, cfg.horizon)


def iid_oracle_quantile(cfg: IidConfig, alpha: float) -> float:
    """Closed-form ``(1 - alpha)``-quantile of the configured score law."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    if cfg.distribution == "uniform":
        return 1.0 - alpha
    return cfg.scale * math.log(1.0 / alpha)


class Ar3Result(NamedTuple):
    scores: np.ndarray
    fallback_rounds: tuple[int, ...]


def ar3_scores(series, burn_in: int) -> Ar3Result:
    """Expanding-window AR(3) one-step forecaster; scores are absolute residuals.

    At each t > burn_in the model (intercept + three lags) is refit by
    ordinary least squares on all points before t.  Rank-deficient fits
    fall back to last-value prediction; those rounds (1-based, in the
    emitted score sequence's time frame) are reported alongside.
    """
    y = np.asarray(series, dtype=float)
    if burn_in < 4:
        raise ValueError(f"burn-in must be >= 4 so at least one lagged row exists, got {burn_in}")
    if len(y) <= burn_in:
        raise ValueError(f"series length {len(y)} must exceed burn-in {burn_in}")
    scores = []
    fallbacks = []
    for t in range(burn_in, len(y)):
        past = y[:t]
        rows = len(past) - 3
        design = np.column_stack(
            [np.ones(rows), past[2:-1], past[1:-2], past[:-3]]
        )
        target = past[3:]
        coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
        if rank < design.shape[1]:
            pred = past[-1]
            fallbacks.append(t + 1)
        else:
            pred = coef[0] + coef[1] * past[-1] + coef[2] * past[-2] + coef[3] * past[-3]
        scores.append(abs(y[t] - pred))
    return Ar3Result(np.array(scores), tuple(fallbacks))


class CsvFormatError(ValueError):
    """Input CSV violates the expected schema; the message names the offending row."""


def ingest_csv(path) -> np.ndarray:
    """Read scores from a CSV with header ``t,score`` or ``t,y,yhat``.

    The three-column form yields ``|y - yhat|`` per row.  Rows must carry
    t = 1, 2, 3, ... in order with no gaps; scores must be finite and
    nonnegative.  Violations raise :class:`CsvFormatError` naming the row.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None
        header = [h.strip().lower() for h in header]
        if header == ["t", "score"]:
            direct = True
        elif header == ["t", "y", "yhat"]:
            direct = False
        else:
            raise CsvFormatError(
                f"{path}: row 1: header must be 't,score' or 't,y,yhat', got {','.join(header)!r}"
            )
        scores = []
        expected_t = 1
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    f"{path}: row {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                t = int(row[0])
                values = [float(c) for c in row[1:]]
            except ValueError:
                raise CsvFormatError(f"{path}: row {lineno}: non-numeric cell") from None
            if t != expected_t:
                raise CsvFormatError(
                    f"{path}: row {lineno}: expected t={expected_t} (sorted, no gaps, starting at 1), got t={t}"
                )
            expected_t += 1
            score = values[0] if direct else abs(values[0] - values[1])
            if math.isnan(score) or math.isinf(score):
                raise CsvFormatError(f"{path}: row {lineno}: score must be finite")
            if score < 0:
                raise CsvFormatError(f"{path}: row {lineno}: negative score {score}")
            scores.append(score)
        if not scores:
            raise CsvFormatError(f"{path}: no data rows")
    return np.array(scores)
