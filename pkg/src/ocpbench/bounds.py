"""Closed-form coverage/regret bound calculators and inequality checkers.

Each calculator evaluates one finite-time guarantee exactly as stated, under
a polynomial score-growth envelope ``S_t <= d * t**q``.  Natural logarithms
throughout.  All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GrowthEnvelope",
    "fit_growth_envelope",
    "BoundVerdict",
    "check_bound",
    "bernoulli_kl",
    "kl_lower_bound_rhs",
    "up_coverage_bound",
    "kt_coverage_bound",
    "osd_coverage_bound",
    "up_regret_envelope",
]

VERDICT_ATOL = 1e-9


@dataclass(frozen=True)
class GrowthEnvelope:
    """Score-growth envelope ``S_t <= d * t**q`` (t starting at 1)."""

    d: float
    q: float

    def __post_init__(self) -> None:
        if not self.d > 0.0 or math.isinf(self.d) or math.isnan(self.d):
            raise ValueError(f"envelope scale d must be a positive real, got {self.d!r}")
        if self.q < 0.0 or math.isnan(self.q):
            raise ValueError(f"envelope exponent q must be >= 0, got {self.q!r}")

    def admits(self, scores) -> bool:
        """True iff every score satisfies the envelope."""
        scores = np.asarray(scores, dtype=float)
        t = np.arange(1, len(scores) + 1, dtype=float)
        return bool(np.all(scores <= self.d * t**self.q))


def fit_growth_envelope(scores, q: float) -> GrowthEnvelope:
    """Tightest envelope at exponent ``q`` admitting the observed stream.

    ``d = max_t S_t / t**q``; the fitted envelope admits the stream by
    construction.  Rejects empty and all-zero streams (the envelope scale
    must be positive).
    """
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValueError("cannot fit an envelope to an empty stream")
    if q < 0.0:
        raise ValueError(f"envelope exponent q must be >= 0, got {q!r}")
    t = np.arange(1, scores.size + 1, dtype=float)
    d = float(np.max(scores / t**q))
    if d <= 0.0:
        raise ValueError("all scores are zero; envelope scale would not be positive")
    return GrowthEnvelope(d=d, q=float(q))


@dataclass(frozen=True)
class BoundVerdict:
    """Outcome of one ``observed <= bound`` check, with slack for reporting."""

    name: str
    observed: float
    bound: float
    holds: bool
    slack: float


def check_bound(name: str, observed: float, bound: float, atol: float = VERDICT_ATOL) -> BoundVerdict:
    """Compare an observed quantity against its bound with a small absolute tolerance."""
    observed = float(observed)
    bound = float(bound)
    return BoundVerdict(
        name=name,
        observed=observed,
        bound=bound,
        holds=bool(observed <= bound + atol),
        slack=bound - observed,
    )


def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), with 0*ln(0) = 0.

    Requires ``p in [0, 1]`` and ``q in (0, 1)`` (the divergence is infinite
    at the excluded endpoints).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q!r}")

    def term(a: float, b: float) -> float:
        return 0.0 if a == 0.0 else a * math.log(a / b)

    return term(p, q) + term(1.0 - p, 1.0 - q)


def kl_lower_bound_rhs(p: float, q: float) -> float:
    """Bernstein-style lower bound ``(p-q)**2 / (2q(1-q) + (2/3)|p-q|)`` on the Bernoulli KL."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q!r}")
    delta = p - q
    if delta == 0.0:
        return 0.0
    return delta * delta / (2.0 * q * (1.0 - q) + (2.0 / 3.0) * abs(delta))


def up_coverage_bound(horizon: int, env: GrowthEnvelope, alpha: float) -> float:
    """Finite-time miscoverage bound for the universal-portfolio calibrator.

    With ``eps = (1/T) * [ln(1 + (1-a) d (T+1)**(q+1) / (q+1)) + 0.5 ln(pi (T+1))]``
    the bound is ``eps + sqrt(2 a (1-a) eps)``.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    t1 = float(horizon + 1)
    eps = (
        math.log1p((1.0 - alpha) * env.d * t1 ** (env.q + 1.0) / (env.q + 1.0))
        + 0.5 * math.log(math.pi * t1)
    ) / horizon
    return eps + math.sqrt(2.0 * alpha * (1.0 - alpha) * eps)


def kt_coverage_bound(horizon: int, env: GrowthEnvelope, alpha: float) -> float:
    """Finite-time miscoverage bound for the Krichevsky-Trofimov bettor.

    ``(1/T) * sqrt(2 T ln(sqrt(24) d (1-a) / (q+1) * T**(3/2+q) + sqrt(24 T)))``.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    T = float(horizon)
    inner = (
        math.sqrt(24.0) * env.d * (1.0 - alpha) / (env.q + 1.0) * T ** (1.5 + env.q)
        + math.sqrt(24.0 * T)
    )
    return math.sqrt(2.0 * T * math.log(inner)) / T


def osd_coverage_bound(horizon: int, env: GrowthEnvelope, eta: float) -> float:
    """Miscoverage bound ``(d T**q / eta + 1) / T`` for fixed-step subgradient descent."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if not eta > 0.0:
        raise ValueError(f"stepsize eta must be positive, got {eta!r}")
    T = float(horizon)
    return (env.d * T**env.q / eta + 1.0) / T


def up_regret_envelope(horizon: int, u: float, alpha: float) -> float:
    """Linearized-regret envelope for the universal-portfolio calibrator at comparator ``u``.

    The max of a variance-adaptive sqrt branch and a logarithmic branch; the
    second branch can be negative for small ``|u|``, which is harmless under
    the max.  Evaluated in log space so extreme ``(T+1)**(3/(2 alpha))``
    factors do not overflow.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    u = abs(u)
    if u == 0.0:
        return 0.0
    t1 = float(horizon + 1)
    # log of 4 (T+1)**(3/(2a)) (1-a) u**2, then log1p(exp(.)) for the +1.
    log_a = (
        math.log(4.0)
        + (3.0 / (2.0 * alpha)) * math.log(t1)
        + math.log(1.0 - alpha)
        + 2.0 * math.log(u)
    )
    log_term = float(np.logaddexp(log_a, 0.0))
    sqrt_branch = u * math.sqrt(2.0 * horizon * alpha * (1.0 - alpha) * log_term)
    log_branch = (4.0 / 3.0) * u * (math.log(3.0 * u * math.sqrt(t1)) - 1.0)
    return max(sqrt_branch, log_branch)
