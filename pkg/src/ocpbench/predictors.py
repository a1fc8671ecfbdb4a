"""Sequential interval calibrators: one class per algorithm, one shared protocol.

Every calibrator is a single-owner state machine driven in strict
alternation: ``next_radius()`` emits the half-width for the upcoming round,
``observe(score)`` settles it and updates state.  All algorithms here are
deterministic given their construction arguments and the score stream.

Emission is clipped to ``max(0, raw)`` for every algorithm (an infinite
radius passes through untouched); the unclipped value of the armed round is
kept in ``last_raw_radius`` for diagnostics.  The wealth-style algorithms
evolve their *raw* state -- clipping never changes the subgradient on
nonnegative scores, so the evolution is unaffected.  The feedback
controller is the exception: its error signal is defined on the emitted
set, so it integrates the clipped value.
"""

from __future__ import annotations

import bisect
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Sequence

from .pinball import RoundOutcome, Trace, make_outcome, validate_alpha

__all__ = [
    "CalibrationProtocolError",
    "Predictor",
    "UniversalPortfolio",
    "KtBettor",
    "ScaleFreeGradient",
    "SubgradientDescent",
    "DtAci",
    "PidControl",
    "TrivialPredictor",
    "AlphaCorrected",
    "alpha_corrected",
    "run_predictor",
    "make_predictor",
    "PREDICTOR_NAMES",
]


class CalibrationProtocolError(RuntimeError):
    """next_radius()/observe() were not called in strict alternation."""


class Predictor(ABC):
    """Base protocol: emit a radius, then observe the score of that round.

    Instances are not safe for concurrent mutation; distinct instances are
    independent.
    """

    def __init__(self, alpha: float):
        self.alpha = validate_alpha(alpha)
        self.rounds_completed = 0
        self.last_raw_radius: float | None = None
        self._armed: float | None = None

    def next_radius(self) -> float:
        """Emit the radius for the upcoming round (clipped at zero)."""
        if self._armed is not None:
            raise CalibrationProtocolError(
                "observe() must settle the armed round before the next emission"
            )
        raw = self._emit()
        if math.isnan(raw):
            raise AssertionError(f"{type(self).__name__} emitted NaN")
        self.last_raw_radius = raw
        self._armed = raw if math.isinf(raw) else max(0.0, raw)
        return self._armed

    def observe(self, score: float) -> RoundOutcome:
        """Settle the armed round against its score and update state."""
        if self._armed is None:
            raise CalibrationProtocolError("next_radius() must be called before observe()")
        radius = self._armed
        self._armed = None
        self.rounds_completed += 1
        outcome = make_outcome(self.rounds_completed, radius, score, self.alpha)
        self._update(outcome)
        return outcome

    @abstractmethod
    def _emit(self) -> float:
        """Raw (unclipped) radius for the upcoming round."""

    @abstractmethod
    def _update(self, outcome: RoundOutcome) -> None:
        """Consume the settled round."""


class UniversalPortfolio(Predictor):
    """Parameter-free calibrator betting a universal two-asset portfolio.

    Keeps a wealth ``W`` (starting at 1) and a miss counter ``N``.  Round
    ``t`` uses the mixture weight ``lam = (N + 1/2) / t`` and bets the
    radius ``W * (lam - alpha) / (alpha (1 - alpha))``; wealth then
    multiplies by ``lam / alpha`` on a miss and ``(1 - lam) / (1 - alpha)``
    on a cover.  Both factors are strictly positive, so wealth stays > 0 on
    every stream.  ``log_wealth`` accumulates the same product in log space
    for overflow-free diagnostics.
    """

    def __init__(self, alpha: float):
        super().__init__(alpha)
        self.wealth = 1.0
        self.log_wealth = 0.0
        self.miss_count = 0

    def _emit(self) -> float:
        t = self.rounds_completed + 1
        lam = (self.miss_count + 0.5) / t
        return self.wealth * (lam - self.alpha) / (self.alpha * (1.0 - self.alpha))

    def _update(self, outcome: RoundOutcome) -> None:
        lam = (self.miss_count + 0.5) / outcome.t
        if outcome.covered:
            growth = (1.0 - lam) / (1.0 - self.alpha)
        else:
            self.miss_count += 1
            growth = lam / self.alpha
        self.wealth *= growth
        self.log_wealth += math.log(growth)


class KtBettor(Predictor):
    """Parameter-free coin bettor with the Krichevsky-Trofimov fraction.

    Bets ``b_t = beta_t * W_{t-1}``; wealth updates with the raw bet,
    ``W_t = W_{t-1} - g_t * b_t``, and the fraction averages past
    subgradients, ``beta_{t+1} = (t * beta_t - g_t) / (t + 1)``, which keeps
    ``|beta| <= 1`` and hence the wealth nonnegative.
    """

    def __init__(self, alpha: float):
        super().__init__(alpha)
        self.wealth = 1.0
        self.fraction = 0.0

    def _emit(self) -> float:
        return self.fraction * self.wealth

    def _update(self, outcome: RoundOutcome) -> None:
        t = outcome.t
        self.wealth -= outcome.grad * self.last_raw_radius
        self.fraction = (t / (t + 1.0)) * self.fraction - outcome.grad / (t + 1.0)


class ScaleFreeGradient(Predictor):
    """Gradient descent normalized by the root of the running squared-gradient sum.

    ``b_{t+1} = b_t - eta * g_t / sqrt(eps + sum_i g_i**2)`` with ``b_1 = 0``.
    """

    def __init__(self, alpha: float, eta: float, eps: float = 1e-6):
        super().__init__(alpha)
        if not eta > 0.0:
            raise ValueError(f"learning rate eta must be positive, got {eta!r}")
        if not eps > 0.0:
            raise ValueError(f"stabilizer eps must be positive, got {eps!r}")
        self.eta = float(eta)
        self.eps = float(eps)
        self.radius_raw = 0.0
        self.grad_sq_sum = 0.0

    def _emit(self) -> float:
        return self.radius_raw

    def _update(self, outcome: RoundOutcome) -> None:
        g = outcome.grad
        self.grad_sq_sum += g * g
        self.radius_raw -= self.eta * g / math.sqrt(self.grad_sq_sum + self.eps)


class SubgradientDescent(Predictor):
    """Fixed-step subgradient descent on the pinball loss: ``b_{t+1} = b_t - eta g_t``."""

    def __init__(self, alpha: float, eta: float):
        super().__init__(alpha)
        if not eta > 0.0:
            raise ValueError(f"stepsize eta must be positive, got {eta!r}")
        self.eta = float(eta)
        self.radius_raw = 0.0

    def _emit(self) -> float:
        return self.radius_raw

    def _update(self, outcome: RoundOutcome) -> None:
        self.radius_raw -= self.eta * outcome.grad


def _level_loss(beta: float, level: float, alpha: float) -> float:
    """Pinball loss in quantile-level space, slope ``alpha`` above and ``alpha - 1`` below."""
    if beta >= level:
        return alpha * (beta - level)
    return (alpha - 1.0) * (beta - level)


class DtAci(Predictor):
    """Dynamically-tuned adaptive conformal inference over a stepsize-expert grid.

    Each expert tracks its own quantile level with stepsize ``gamma_i``; an
    exponentially-weighted aggregation with fixed-share mixing picks the
    working level each round.  The emitted radius is the empirical
    ``(1 - level)``-quantile of all past scores, taken as the
    ``ceil((1 - level) * m)``-th order statistic of the ``m`` past scores
    with no interpolation.  Degenerate levels map to degenerate sets: a
    level <= 0 (or an empty history) emits an infinite radius, a level >= 1
    emits zero.

    On the very first round there is no empirical distribution, so the
    expert weight update is skipped (the level updates still run, with the
    infinite set counting as covered).
    """

    DEFAULT_GAMMAS = tuple(0.001 * 2**k for k in range(8))

    def __init__(
        self,
        alpha: float,
        gammas: Sequence[float] | None = None,
        sigma: float = 0.001,
        eta: float = math.e,
    ):
        super().__init__(alpha)
        self.gammas = tuple(float(g) for g in (gammas if gammas is not None else self.DEFAULT_GAMMAS))
        if not self.gammas or any(g <= 0 for g in self.gammas):
            raise ValueError("expert stepsizes must be a nonempty positive sequence")
        if not 0.0 <= sigma < 1.0:
            raise ValueError(f"fixed-share rate sigma must be in [0, 1), got {sigma!r}")
        self.sigma = float(sigma)
        self.eta = float(eta)
        self.levels = [self.alpha] * len(self.gammas)
        self.weights = [1.0] * len(self.gammas)
        self.history: list[float] = []  # kept sorted
        self.agg_level = self.alpha

    def probabilities(self) -> list[float]:
        total = sum(self.weights)
        return [w / total for w in self.weights]

    def _radius_at(self, level: float) -> float:
        m = len(self.history)
        if m == 0 or level <= 0.0:
            return math.inf
        if level >= 1.0:
            return 0.0
        rank = math.ceil((1.0 - level) * m)
        return self.history[min(rank, m) - 1]

    def _emit(self) -> float:
        probs = self.probabilities()
        self.agg_level = sum(p * a for p, a in zip(probs, self.levels))
        return self._radius_at(self.agg_level)

    def _update(self, outcome: RoundOutcome) -> None:
        score = outcome.score
        m = len(self.history)
        if m > 0:
            beta = bisect.bisect_right(self.history, score) / m
            mixed = [
                w * math.exp(-self.eta * _level_loss(beta, level, self.alpha))
                for w, level in zip(self.weights, self.levels)
            ]
            total = sum(mixed)
            k = len(mixed)
            self.weights = [
                (1.0 - self.sigma) * w + total * self.sigma / k for w in mixed
            ]
            norm = sum(self.weights)
            self.weights = [w / norm for w in self.weights]
        for i, (level, gamma) in enumerate(zip(self.levels, self.gammas)):
            err = 1.0 if score > self._radius_at(level) else 0.0
            self.levels[i] = level + gamma * (self.alpha - err)
        bisect.insort(self.history, score)


class PidControl(Predictor):
    """Feedback controller on the coverage error (quantile tracking, optional integrator).

    Update: ``b_{t+1} = b_t + eta * (err_t - alpha) + r(E_t)`` where
    ``err_t`` is the miss indicator of the emitted set and ``E_t`` the
    cumulative error.  The gain is ``lambda_gain * max_score`` by default
    (tracks the score scale) or a fixed ``gain`` when given.  With
    ``integrator=True`` the saturating term
    ``r(E) = k_i * tan(E * ln(T) / (T * c_sat))`` is added; its argument is
    clamped to ``+/-(pi/2 - 1e-6)`` so the output stays finite on
    adversarial streams.  ``k_i`` defaults to the running max score and
    ``c_sat`` to ``(2/pi) * ln(T * delta)``, which requires ``T * delta > 1``
    (pass ``c_sat`` explicitly for very short horizons).
    """

    TAN_CLAMP = math.pi / 2.0 - 1e-6

    def __init__(
        self,
        alpha: float,
        lambda_gain: float = 0.1,
        gain: float | None = None,
        integrator: bool = False,
        k_i: float | None = None,
        c_sat: float | None = None,
        horizon: int | None = None,
        delta: float = 0.01,
    ):
        super().__init__(alpha)
        if lambda_gain < 0.0:
            raise ValueError(f"gain scale must be >= 0, got {lambda_gain!r}")
        self.lambda_gain = float(lambda_gain)
        self.gain = None if gain is None else float(gain)
        self.integrator = bool(integrator)
        self.k_i = None if k_i is None else float(k_i)
        self.horizon = None if horizon is None else int(horizon)
        if self.integrator:
            if self.horizon is None or self.horizon < 1:
                raise ValueError("the integrator needs a positive horizon at construction")
            if c_sat is None:
                c_sat = (2.0 / math.pi) * math.log(self.horizon * delta)
                if c_sat <= 0.0:
                    raise ValueError(
                        f"default saturation constant is nonpositive for horizon {self.horizon} "
                        f"and delta {delta}; pass c_sat explicitly"
                    )
            elif c_sat <= 0.0:
                raise ValueError(f"saturation constant must be positive, got {c_sat!r}")
        self.c_sat = None if c_sat is None else float(c_sat)
        self.radius_raw = 0.0
        self.cum_err = 0.0
        self.max_score = 0.0

    def _emit(self) -> float:
        return self.radius_raw

    def _update(self, outcome: RoundOutcome) -> None:
        self.max_score = max(self.max_score, outcome.score)
        err = 0.0 if outcome.covered else 1.0
        self.cum_err += err - self.alpha
        eta = self.gain if self.gain is not None else self.lambda_gain * self.max_score
        step = eta * (err - self.alpha)
        if self.integrator:
            k_i = self.k_i if self.k_i is not None else self.max_score
            arg = self.cum_err * math.log(self.horizon) / (self.horizon * self.c_sat)
            arg = max(-self.TAN_CLAMP, min(self.TAN_CLAMP, arg))
            step += k_i * math.tan(arg)
        # The controller's feedback acts on the emitted (clipped) set.
        self.radius_raw = outcome.radius + step


class TrivialPredictor(Predictor):
    """Deterministic cyclic schedule of full and empty sets hitting coverage exactly.

    Approximates the coverage target as a reduced fraction ``k/n`` (best
    rational with denominator <= 1000) and, within each length-``n`` cycle,
    emits an infinite radius at the ``k`` positions where
    ``floor((i+1) k / n)`` increments, zero otherwise.  On positive scores
    the cumulative coverage error returns to exactly zero at every cycle
    boundary.
    """

    def __init__(self, alpha: float, max_denominator: int = 1000):
        super().__init__(alpha)
        frac = Fraction(1.0 - self.alpha).limit_denominator(max_denominator)
        if not 0 < frac < 1:
            raise ValueError(
                f"coverage target {1.0 - self.alpha} has no usable rational approximation "
                f"with denominator <= {max_denominator}"
            )
        self.k = frac.numerator
        self.n = frac.denominator

    def _emit(self) -> float:
        i = self.rounds_completed % self.n
        if (i + 1) * self.k // self.n > i * self.k // self.n:
            return math.inf
        return 0.0

    def _update(self, outcome: RoundOutcome) -> None:
        pass


class AlphaCorrected(Predictor):
    """Wrapper running any calibrator at a level offset by ``k / sqrt(T)``.

    The inner algorithm is constructed at the adjusted miscoverage level
    (lowered by default, which raises coverage); emitted radii are the
    inner's.  Outcomes carry subgradients at the *nominal* level so that
    all reported metrics and identities refer to the requested target.
    """

    def __init__(
        self,
        inner_factory: Callable[[float], Predictor],
        alpha: float,
        k: float,
        horizon: int,
        raise_coverage: bool = True,
    ):
        alpha = validate_alpha(alpha)
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        offset = k / math.sqrt(horizon)
        effective = alpha - offset if raise_coverage else alpha + offset
        if not 0.0 < effective < 1.0:
            raise ValueError(
                f"adjusted miscoverage level {effective} falls outside (0, 1)"
            )
        self.inner = inner_factory(effective)
        if not isinstance(self.inner, Predictor):
            raise TypeError("inner_factory must build a Predictor")
        super().__init__(alpha)
        self.effective_alpha = effective

    def _emit(self) -> float:
        return self.inner.next_radius()

    def _update(self, outcome: RoundOutcome) -> None:
        self.inner.observe(outcome.score)


def alpha_corrected(
    inner_factory: Callable[[float], Predictor],
    alpha: float,
    k: float,
    horizon: int,
    raise_coverage: bool = True,
) -> AlphaCorrected:
    """Convenience constructor for :class:`AlphaCorrected`."""
    return AlphaCorrected(inner_factory, alpha, k, horizon, raise_coverage)


def run_predictor(predictor: Predictor, scores: Sequence[float]) -> Trace:
    """Drive a calibrator through a score stream and collect the trace.

    Wealth-based algorithms get their post-round wealth recorded alongside
    the outcomes.
    """
    outcomes = []
    track_wealth = hasattr(predictor, "wealth")
    wealth: list[float] | None = [] if track_wealth else None
    for s in scores:
        predictor.next_radius()
        outcomes.append(predictor.observe(float(s)))
        if wealth is not None:
            wealth.append(predictor.wealth)
    return Trace(tuple(outcomes), tuple(wealth) if wealth is not None else None)


def _build_pid(alpha: float, horizon: int | None, integrator: bool, params: dict) -> PidControl:
    return PidControl(
        alpha,
        lambda_gain=float(params.pop("lambda", 0.1)),
        gain=(float(params.pop("gain")) if "gain" in params else None),
        integrator=integrator,
        k_i=(float(params.pop("ki")) if "ki" in params else None),
        c_sat=(float(params.pop("csat")) if "csat" in params else None),
        horizon=horizon,
        delta=float(params.pop("delta", 0.01)),
    )


def make_predictor(
    name: str, alpha: float, horizon: int | None = None, **params
) -> Predictor:
    """Build a calibrator by registry name.

    Known names: ``up``, ``kt``, ``sfogd`` (param ``eta``), ``osd`` (param
    ``eta``), ``dtaci`` (params ``sigma``, ``eta``), ``p`` / ``pi`` (params
    ``lambda``, ``gain``, ``ki``, ``csat``, ``delta``), ``trivial``.
    """
    params = dict(params)
    key = name.lower()
    if key == "up":
        built = UniversalPortfolio(alpha)
    elif key == "kt":
        built = KtBettor(alpha)
    elif key == "sfogd":
        built = ScaleFreeGradient(
            alpha, eta=float(params.pop("eta", 1.0)), eps=float(params.pop("eps", 1e-6))
        )
    elif key == "osd":
        built = SubgradientDescent(alpha, eta=float(params.pop("eta", 1.0)))
    elif key == "dtaci":
        built = DtAci(
            alpha,
            sigma=float(params.pop("sigma", 0.001)),
            eta=float(params.pop("eta", math.e)),
        )
    elif key == "p":
        built = _build_pid(alpha, horizon, integrator=False, params=params)
    elif key == "pi":
        built = _build_pid(alpha, horizon, integrator=True, params=params)
    elif key == "trivial":
        built = TrivialPredictor(alpha)
    else:
        raise ValueError(f"unknown predictor {name!r}; known: {', '.join(PREDICTOR_NAMES)}")
    if params:
        raise ValueError(f"unknown parameters for predictor {name!r}: {sorted(params)}")
    return built


PREDICTOR_NAMES = ("up", "kt", "sfogd", "osd", "dtaci", "p", "pi", "trivial")
