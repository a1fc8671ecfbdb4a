import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocpbench.generators import IidConfig, gen_iid, iid_oracle_quantile
from ocpbench.metrics import (
    compute_metrics,
    pareto_frontier,
    rolling_local,
    target_tracking,
    width_convergence_check,
)
from ocpbench.pinball import Trace, make_outcome, pinball_regret
from ocpbench.predictors import TrivialPredictor, UniversalPortfolio, run_predictor


def trace_from(radii, scores, alpha=0.1):
    outs = tuple(
        make_outcome(i, r, s, alpha) for i, (r, s) in enumerate(zip(radii, scores), 1)
    )
    return Trace(outs)


def flag_trace(flags, alpha=0.1):
    radii = [2.0 if c else 0.0 for c in flags]
    scores = [1.0] * len(flags)
    return trace_from(radii, scores, alpha)


class TestComputeMetrics:
    def test_longest_error_run(self):
        tr = flag_trace([False, False, True, False])
        rep = compute_metrics(tr, burn_in=0, alpha=0.1)
        assert rep.longest_error_run == 2
        assert rep.marginal_coverage == 0.25
        assert rep.rounds_used == 4

    def test_burn_in_discard(self):
        tr = flag_trace([False] * 50 + [True] * 50)
        rep = compute_metrics(tr, burn_in=50, alpha=0.1)
        assert rep.marginal_coverage == 1.0
        assert rep.rounds_used == 50

    def test_one_infinite_radius_inflates_mean_not_median(self):
        radii = [1.0] * 9 + [math.inf]
        tr = trace_from(radii, [0.5] * 10)
        rep = compute_metrics(tr, burn_in=0, alpha=0.1)
        assert math.isinf(rep.mean_size)
        assert rep.median_size == 2.0
        assert math.isinf(rep.q95_size)

    def test_quantile_ordering_always(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            radii = rng.uniform(0, 5, n)
            radii[rng.random(n) < 0.2] = math.inf
            tr = trace_from(radii, rng.uniform(0, 5, n))
            rep = compute_metrics(tr, burn_in=0, alpha=0.2)
            assert rep.median_size <= rep.q75_size <= rep.q90_size <= rep.q95_size

    def test_q90_infinite_iff_more_than_ten_percent(self):
        for n_inf in (0, 1, 2, 3):
            radii = [1.0] * (20 - n_inf) + [math.inf] * n_inf
            tr = trace_from(radii, [0.5] * 20)
            rep = compute_metrics(tr, burn_in=0, alpha=0.1)
            assert math.isinf(rep.q90_size) == (n_inf / 20 > 0.10)

    def test_miscov_matches_grad_identity(self):
        rng = np.random.default_rng(4)
        flags = rng.random(200) < 0.9
        tr = flag_trace(list(flags), alpha=0.1)
        rep = compute_metrics(tr, burn_in=0, alpha=0.1)
        assert rep.miscov == pytest.approx(
            abs(float(np.sum(tr.grads))) / len(tr), abs=1e-12
        )

    def test_burn_in_must_leave_rounds(self):
        tr = flag_trace([True, False])
        with pytest.raises(ValueError):
            compute_metrics(tr, burn_in=2, alpha=0.1)

    @given(st.lists(st.booleans(), min_size=1, max_size=100))
    def test_coverage_in_unit_interval(self, flags):
        rep = compute_metrics(flag_trace(flags), burn_in=0, alpha=0.1)
        assert 0.0 <= rep.marginal_coverage <= 1.0

    def test_infinity_never_decreases_quantiles(self):
        rng = np.random.default_rng(7)
        radii = list(rng.uniform(0, 3, 40))
        base = compute_metrics(trace_from(radii, [1.0] * 40), 0, 0.1)
        more = compute_metrics(trace_from(radii + [math.inf], [1.0] * 41), 0, 0.1)
        for field in ("median_size", "q75_size", "q90_size", "q95_size"):
            assert getattr(more, field) >= getattr(base, field)


class TestRollingLocal:
    def test_constant_coverage(self):
        tr = flag_trace([True] * 30)
        cov, _ = rolling_local(tr, window=10)
        assert np.array_equal(cov, np.ones(21))

    def test_alternating_half(self):
        tr = flag_trace([True, False] * 20)
        cov, _ = rolling_local(tr, window=2)
        assert cov == pytest.approx(np.full(39, 0.5))

    def test_window_equals_length_gives_marginal(self):
        flags = [True, True, False, True]
        tr = flag_trace(flags)
        cov, width = rolling_local(tr, window=4)
        assert cov.shape == (1,)
        assert cov[0] == pytest.approx(0.75)
        assert width[0] == pytest.approx(np.mean(2 * tr.radii))

    def test_window_larger_than_trace_rejected(self):
        with pytest.raises(ValueError):
            rolling_local(flag_trace([True]), window=2)

    def test_infinite_width_propagates(self):
        tr = trace_from([1.0, math.inf, 1.0, 1.0], [0.5] * 4)
        _, width = rolling_local(tr, window=2)
        assert math.isinf(width[0]) and math.isinf(width[1]) and width[2] == 2.0


class TestParetoFrontier:
    def make_runs(self):
        rng = np.random.default_rng(2)
        runs = {}
        for alpha in (0.1, 0.2):
            for seed in (1, 2, 3):
                flags = rng.random(100) < (1 - alpha)
                runs[("demo", alpha, seed)] = flag_trace(list(flags), alpha)
        return runs

    def test_single_seed_zero_se(self):
        runs = {("demo", 0.1, 1): flag_trace([True] * 60)}
        pts = pareto_frontier(runs, size_stat="mean", burn_in=0)
        assert len(pts) == 1
        assert pts[0].se_coverage == 0.0 and pts[0].se_size == 0.0

    def test_seed_averaging_and_se(self):
        runs = self.make_runs()
        pts = pareto_frontier(runs, size_stat="mean", burn_in=0)
        assert len(pts) == 2  # one cell per (predictor, alpha), each aggregating 3 seeds
        assert {p.target_alpha for p in pts} == {0.1, 0.2}
        for p in pts:
            assert p.se_coverage >= 0.0

    def test_infinite_stat_point_emitted(self):
        runs = {
            ("demo", 0.1, 1): trace_from([math.inf] * 20, [1.0] * 20),
            ("demo", 0.1, 2): trace_from([1.0] * 20, [0.5] * 20),
        }
        pts = pareto_frontier(runs, size_stat="mean", burn_in=0)
        assert len(pts) == 1
        assert math.isinf(pts[0].size_stat)
        assert pts[0].se_size == 0.0

    def test_sorted_by_coverage_within_predictor(self):
        pts = pareto_frontier(self.make_runs(), size_stat="median", burn_in=0)
        covs = [p.realized_coverage for p in pts]
        assert covs == sorted(covs)

    def test_unknown_stat_rejected(self):
        with pytest.raises(ValueError):
            pareto_frontier(self.make_runs(), size_stat="max")

    def test_rising_coverage_warns_not_raises(self):
        runs = {
            ("demo", 0.1, 1): flag_trace([True] * 5 + [False] * 5, 0.1),
            ("demo", 0.2, 1): flag_trace([True] * 9 + [False], 0.2),
        }
        with pytest.warns(UserWarning, match="realized coverage rose"):
            pts = pareto_frontier(runs, size_stat="mean", burn_in=0)
        assert len(pts) == 2

    def test_monotone_coverage_does_not_warn(self):
        import warnings as w

        runs = {
            ("demo", 0.1, 1): flag_trace([True] * 9 + [False], 0.1),
            ("demo", 0.2, 1): flag_trace([True] * 5 + [False] * 5, 0.2),
        }
        with w.catch_warnings():
            w.simplefilter("error")
            pareto_frontier(runs, size_stat="mean", burn_in=0)


class TestSinusoidFrontier:
    def test_portfolio_dominates_kt_on_mean_size(self):
        """At matched small targets the portfolio bettor's mean size is smaller."""
        from ocpbench.generators import SinusoidConfig, gen_sinusoid
        from ocpbench.predictors import KtBettor

        runs = {}
        for seed in (1, 2, 3):
            scores = gen_sinusoid(SinusoidConfig(seed=seed))
            runs[("up", 0.05, seed)] = run_predictor(UniversalPortfolio(0.05), scores)
            runs[("kt", 0.05, seed)] = run_predictor(KtBettor(0.05), scores)
        pts = {p.predictor_id: p for p in pareto_frontier(runs, "mean", burn_in=50)}
        assert pts["up"].size_stat < pts["kt"].size_stat
        assert pts["up"].realized_coverage >= pts["kt"].realized_coverage - 0.01


class TestTargetTracking:
    def test_trivial_predictor_exact_on_cycle_multiple(self):
        scores = np.full(100, 0.5)
        trace = run_predictor(TrivialPredictor(0.2), scores)
        pts = target_tracking({("trivial", 0.2, 1): trace}, burn_in=0)
        assert pts[0].realized_coverage == pytest.approx(0.8, abs=1e-15)
        assert pts[0].within_band

    def test_band_verdict(self):
        runs = {("x", 0.5, 1): flag_trace([True] * 9 + [False], alpha=0.5)}
        pts = target_tracking(runs, burn_in=0, band=0.03)
        assert pts[0].target_coverage == 0.5
        assert pts[0].realized_coverage == 0.9
        assert not pts[0].within_band

    def test_up_near_target_on_iid(self):
        scores = gen_iid(IidConfig("uniform", horizon=4000, seed=3))
        trace = run_predictor(UniversalPortfolio(0.5), scores)
        pts = target_tracking({("up", 0.5, 3): trace}, burn_in=50)
        assert abs(pts[0].realized_coverage - 0.5) < 0.05


class TestWidthConvergence:
    def test_constant_oracle_radius_holds(self):
        tr = trace_from([0.9] * 100, list(np.linspace(0, 1, 100)))
        reg = pinball_regret(tr, 0.9, alpha=0.1)
        verdict = width_convergence_check(tr, 0.9, kappa=1.0, regret_budget=reg)
        assert verdict.observed == pytest.approx(0.0, abs=1e-20) and verdict.holds

    def test_uniform_scores_universal_portfolio(self):
        cfg = IidConfig("uniform", horizon=10_000, seed=1)
        scores = gen_iid(cfg)
        tr = run_predictor(UniversalPortfolio(0.1), scores)
        bstar = iid_oracle_quantile(cfg, 0.1)
        reg = pinball_regret(tr, bstar, alpha=0.1)
        verdict = width_convergence_check(tr, bstar, kappa=1.0, regret_budget=reg)
        assert verdict.holds

    def test_infinite_radius_rejected(self):
        tr = trace_from([math.inf], [1.0])
        with pytest.raises(ValueError):
            width_convergence_check(tr, 0.9, 1.0, 1.0)

    def test_bad_kappa_rejected(self):
        tr = trace_from([1.0], [1.0])
        with pytest.raises(ValueError):
            width_convergence_check(tr, 0.9, 0.0, 1.0)
