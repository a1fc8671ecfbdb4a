"""Pinball-loss primitives shared by every calibrator and every check.

The online game: at each round the calibrator emits an interval half-width
(the *radius*), then observes a nonnegative nonconformity score.  The round
is covered when ``radius >= score`` (ties count as covered), and the
calibrator receives the subgradient of the ``(1 - alpha)``-pinball loss

    loss(b, s) = max{(1 - alpha) * (s - b), alpha * (b - s)}

which is ``alpha`` on covered rounds and ``-(1 - alpha)`` on misses.  The
coverage flag and the subgradient are always derived from the same
comparison, so they can never disagree.

Everything here is a pure function over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "validate_alpha",
    "pinball_loss",
    "subgradient",
    "is_covered",
    "RoundOutcome",
    "make_outcome",
    "Trace",
    "miscoverage",
    "linearized_regret",
    "pinball_regret",
]

# Absolute tolerance for identities that hold exactly in real arithmetic.
IDENTITY_ATOL = 1e-12


def validate_alpha(alpha: float) -> float:
    """Check a target miscoverage rate, which must lie strictly in (0, 1)."""
    alpha = float(alpha)
    if math.isnan(alpha) or not 0.0 < alpha < 1.0:
        raise ValueError(f"target miscoverage rate must be in (0, 1), got {alpha!r}")
    return alpha


def pinball_loss(b: float, score: float, alpha: float) -> float:
    """Pinball (quantile) loss of radius ``b`` against ``score`` at level ``1 - alpha``.

    Total in ``b`` (negative radii allowed), convex, and
    ``max(alpha, 1 - alpha)``-Lipschitz.  Zero iff ``b == score``.
    """
    return max((1.0 - alpha) * (score - b), alpha * (b - score))


def subgradient(b: float, score: float, alpha: float) -> float:
    """Right subgradient of the pinball loss at ``b``: ``alpha`` if ``b >= score``."""
    return alpha if b >= score else alpha - 1.0


def is_covered(b: float, score: float) -> bool:
    """Coverage indicator, with ties (``b == score``) counted as covered."""
    return b >= score


@dataclass(frozen=True)
class RoundOutcome:
    """One completed round: emitted radius, observed score, and their verdict.

    ``covered`` and ``grad`` are consistent by construction (see
    :func:`make_outcome`); ``radius`` is the emitted value, i.e. already
    clipped to ``[0, inf]``.
    """

    t: int
    radius: float
    score: float
    covered: bool
    grad: float


def make_outcome(t: int, radius: float, score: float, alpha: float) -> RoundOutcome:
    """Build a :class:`RoundOutcome`, deriving flag and subgradient from one comparison."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    if math.isnan(radius) or radius < 0.0:
        raise ValueError(f"emitted radius must be >= 0 or +inf, got {radius!r}")
    if math.isnan(score) or math.isinf(score) or score < 0.0:
        raise ValueError(f"score must be a finite nonnegative real, got {score!r}")
    covered = is_covered(radius, score)
    grad = alpha if covered else alpha - 1.0
    return RoundOutcome(t=t, radius=float(radius), score=float(score), covered=covered, grad=grad)


@dataclass(frozen=True)
class Trace:
    """The full outcome sequence of one run, with optional wealth sidecar.

    ``wealth[i]`` is the calibrator's wealth after round ``i + 1`` for
    wealth-based algorithms, ``None`` otherwise.
    """

    outcomes: tuple[RoundOutcome, ...]
    wealth: tuple[float, ...] | None = None

    def __len__(self) -> int:
        return len(self.outcomes)

    def __iter__(self) -> Iterator[RoundOutcome]:
        return iter(self.outcomes)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            wealth = self.wealth[idx] if self.wealth is not None else None
            return Trace(self.outcomes[idx], wealth)
        return self.outcomes[idx]

    @cached_property
    def radii(self) -> np.ndarray:
        return np.array([o.radius for o in self.outcomes], dtype=float)

    @cached_property
    def scores(self) -> np.ndarray:
        return np.array([o.score for o in self.outcomes], dtype=float)

    @cached_property
    def grads(self) -> np.ndarray:
        return np.array([o.grad for o in self.outcomes], dtype=float)

    @cached_property
    def covered(self) -> np.ndarray:
        return np.array([o.covered for o in self.outcomes], dtype=bool)


def miscoverage(trace: Trace | Sequence[RoundOutcome], alpha: float) -> float:
    """Absolute gap between realized coverage and the ``1 - alpha`` target.

    Computed from the coverage counts and cross-checked against the
    subgradient identity ``|sum g_t| / T`` (the two must agree to machine
    precision; subgradients are recomputed at the given ``alpha`` so the
    check also holds for level-adjusted runs).
    """
    alpha = validate_alpha(alpha)
    outcomes = trace.outcomes if isinstance(trace, Trace) else tuple(trace)
    n = len(outcomes)
    if n == 0:
        raise ValueError("miscoverage is undefined for an empty trace")
    n_cov = sum(1 for o in outcomes if o.covered)
    from_counts = abs(n_cov / n - (1.0 - alpha))
    grad_sum = n_cov * alpha + (n - n_cov) * (alpha - 1.0)
    from_grads = abs(grad_sum) / n
    if abs(from_counts - from_grads) > IDENTITY_ATOL:
        raise AssertionError(
            f"miscoverage identity violated: {from_counts!r} vs {from_grads!r}"
        )
    return from_counts


def linearized_regret(trace: Trace, u: float) -> float:
    """Subgradient-linearized regret ``sum_t g_t * (b_t - u)`` against a fixed ``u``.

    Rejects traces containing infinite radii, where the sum is undefined.
    """
    if len(trace) == 0:
        raise ValueError("linearized regret is undefined for an empty trace")
    radii = trace.radii
    if np.isinf(radii).any():
        raise ValueError("linearized regret is undefined for infinite radii")
    return float(np.dot(trace.grads, radii - u))


def pinball_regret(trace: Trace, u: float, alpha: float) -> float:
    """Cumulative pinball loss of the trace minus that of the constant radius ``u``."""
    if len(trace) == 0:
        raise ValueError("pinball regret is undefined for an empty trace")
    alpha = validate_alpha(alpha)
    radii = trace.radii
    if np.isinf(radii).any():
        raise ValueError("pinball regret is undefined for infinite radii")
    scores = trace.scores
    loss_run = np.maximum((1.0 - alpha) * (scores - radii), alpha * (radii - scores))
    loss_ref = np.maximum((1.0 - alpha) * (scores - u), alpha * (u - scores))
    return float(np.sum(loss_run - loss_ref))
