"""Two-asset market encoding of the pinball-subgradient game.

A round's subgradient ``g in {-(1-alpha), alpha}`` is recoded as the gross
returns of two synthetic stocks: stock 1 pays ``1/alpha`` on a miss and
nothing on a cover, stock 2 pays ``1/(1-alpha)`` on a cover and nothing on a
miss.  A portfolio weight ``lam`` (fraction of wealth on stock 1) is
equivalent to a signed coin bet with fraction ``(lam - alpha)/(alpha(1-alpha))``,
and the bet amount ``b = beta * W`` is exactly the calibration radius before
clipping.

This module hosts the replay and diagnostic tools for that game, plus the
quadrature evaluation of the wealth-mixture weight used to validate the
production closed-form update.  The quadrature integrates over the arcsine
prior by substituting ``lam = sin(theta/2)**2``, which absorbs the endpoint
singularities; a midpoint rule in ``theta`` then integrates the (degree <=
rounds + 1) polynomial integrand exactly once the node count exceeds half
the degree.  Wealth is accumulated in log space because the raw product
spans hundreds of orders of magnitude on long streams.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .bounds import bernoulli_kl
from .pinball import validate_alpha

__all__ = [
    "market_returns",
    "lambda_to_beta",
    "wealth_replay",
    "UniversalPortfolioMixture",
    "up_weight_integral",
    "best_crp_log_wealth",
]

DEFAULT_NODES = 100_000


def _check_grad(g: float, alpha: float) -> float:
    g = float(g)
    if not (
        math.isclose(g, alpha, rel_tol=0.0, abs_tol=1e-12)
        or math.isclose(g, alpha - 1.0, rel_tol=0.0, abs_tol=1e-12)
    ):
        raise ValueError(f"subgradient must be alpha or alpha - 1, got {g!r}")
    return g


def market_returns(g: float, alpha: float) -> tuple[float, float]:
    """Gross returns ``(w1, w2)`` of the two synthetic stocks for one round."""
    alpha = validate_alpha(alpha)
    g = _check_grad(g, alpha)
    w1 = -g / alpha + 1.0
    w2 = 1.0 + g / (1.0 - alpha)
    return (w1, w2)


def lambda_to_beta(lam: float, alpha: float) -> float:
    """Signed betting fraction ``(lam - alpha) / (alpha (1 - alpha))`` of a portfolio weight.

    Maps ``[0, 1]`` onto the no-bankruptcy interval
    ``[-1/(1-alpha), 1/alpha]``.
    """
    alpha = validate_alpha(alpha)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"portfolio weight must be in [0, 1], got {lam!r}")
    return (lam - alpha) / (alpha * (1.0 - alpha))


def wealth_replay(
    lambdas: Sequence[float], grads: Sequence[float], alpha: float
) -> tuple[float, list[float]]:
    """Replay a weight sequence through the market; return final wealth and raw radii.

    ``W_t = W_{t-1} (lam_t w_{t,1} + (1 - lam_t) w_{t,2})`` with ``W_0 = 1``;
    the radius of round ``t`` is the bet amount
    ``b_t = W_{t-1} (-(1-alpha)**-1 + lam_t / (alpha (1-alpha)))``, unclipped
    and possibly negative.
    """
    alpha = validate_alpha(alpha)
    if len(lambdas) != len(grads):
        raise ValueError(
            f"length mismatch: {len(lambdas)} weights vs {len(grads)} subgradients"
        )
    wealth = 1.0
    radii: list[float] = []
    for lam, g in zip(lambdas, grads):
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"portfolio weight must be in [0, 1], got {lam!r}")
        radii.append(wealth * lambda_to_beta(lam, alpha))
        w1, w2 = market_returns(g, alpha)
        wealth *= lam * w1 + (1.0 - lam) * w2
    return wealth, radii


class UniversalPortfolioMixture:
    """Incremental quadrature of the wealth-weighted mixture weight.

    Feed one subgradient per round with :meth:`update`; :meth:`next_lambda`
    returns the mixture weight for the upcoming round.  Exists for
    validation only: the production path is the O(1) closed-form counter
    update, this is its O(nodes)-per-round oracle.
    """

    def __init__(self, alpha: float, nodes: int = DEFAULT_NODES):
        self.alpha = validate_alpha(alpha)
        if nodes < 1000:
            raise ValueError(f"node count must be >= 1000, got {nodes}")
        theta = math.pi * (np.arange(nodes) + 0.5) / nodes
        self.lams = np.sin(theta / 2.0) ** 2
        self.log_wealth = np.zeros(nodes)
        self.rounds = 0

    def update(self, g: float) -> None:
        w1, w2 = market_returns(g, self.alpha)
        self.log_wealth += np.log(self.lams * w1 + (1.0 - self.lams) * w2)
        self.rounds += 1

    def next_lambda(self) -> float:
        # Normalize by the running max before exponentiating; the level
        # constant cancels in the ratio.
        scaled = np.exp(self.log_wealth - self.log_wealth.max())
        return float(np.dot(self.lams, scaled) / scaled.sum())


def up_weight_integral(
    grads: Sequence[float], alpha: float, nodes: int = DEFAULT_NODES
) -> float:
    """Mixture weight after a subgradient history, evaluated by quadrature.

    With an empty history this is the prior mean 1/2.
    """
    mixture = UniversalPortfolioMixture(alpha, nodes)
    for g in grads:
        mixture.update(g)
    return mixture.next_lambda()


def best_crp_log_wealth(miss_count: int, horizon: int, alpha: float) -> float:
    """Log wealth of the best constant portfolio: ``T * KL(M/T || alpha)``."""
    alpha = validate_alpha(alpha)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if not 0 <= miss_count <= horizon:
        raise ValueError(
            f"miss count must be in [0, {horizon}], got {miss_count}"
        )
    return horizon * bernoulli_kl(miss_count / horizon, alpha)
