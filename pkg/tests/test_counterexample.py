import itertools
import math

import numpy as np
import pytest

from conftest import normal_cdf_series
from poissonlab.counterexample import (
    CounterexampleConfig,
    RiskEstimate,
    asymptotic_limits,
    bayes_risk,
    conditional_bayes_risk,
    make_fbeta,
    occupancy_shortfall_prob,
    run_decision_problem,
    target_m,
)
from poissonlab.errors import ConfigurationError, DomainError
from poissonlab.experiments import occupancy_moments_exact
from poissonlab.mc import stream_rng


def completion_risk_oracle(n, z, m, K):
    """Average mistake probability of the random-completion rule, by
    enumeration: complete the K named cells with m-K draws from the n-K
    unnamed ones; a mistake happens iff any draw hits one of the z zero
    cells (zero cells are never occupied, so they are all unnamed)."""
    if K >= m:
        return 0.0
    remaining = n - K
    # unnamed cells: z zero cells, remaining - z nonzero
    cells = [True] * z + [False] * (remaining - z)
    total = 0
    mistakes = 0
    for combo in itertools.combinations(range(remaining), m - K):
        total += 1
        mistakes += any(cells[i] for i in combo)
    return mistakes / total


class TestMakeFbeta:
    def test_worked_example(self):
        masses = make_fbeta(16, 0.6, zero_set=range(5))
        assert np.count_nonzero(masses == 0.0) == 5
        nonzero = masses[masses > 0]
        assert np.allclose(nonzero, 1.0 / 11.0, rtol=1e-15)
        # density value on a cell is mass * n = 16/11
        assert nonzero[0] * 16 == pytest.approx(16.0 / 11.0, rel=1e-15)

    def test_total_mass_one(self, rng):
        masses = make_fbeta(100, 0.7, rng=rng)
        assert math.fsum(masses) == pytest.approx(1.0, abs=1e-12)

    def test_wrong_zero_set_size(self):
        with pytest.raises(ConfigurationError):
            make_fbeta(16, 0.6, zero_set=range(4))

    def test_needs_source_of_zeros(self):
        with pytest.raises(ConfigurationError):
            make_fbeta(16, 0.6)

    def test_random_draw_deterministic(self):
        a = make_fbeta(64, 0.6, rng=stream_rng(0, 0))
        b = make_fbeta(64, 0.6, rng=stream_rng(0, 0))
        assert np.array_equal(a, b)


class TestTargetM:
    def test_small_example(self):
        assert target_m(16, 0.6) == 4

    def test_large_example(self):
        assert target_m(10**6, 0.6) == 630068

    def test_sits_below_occupancy_mean(self):
        for n in (100, 1000, 10**4, 10**5):
            for beta in (0.55, 0.6, 0.7, 0.8):
                z = math.floor(n**beta)
                m = target_m(n, beta)
                mean_iid, _ = occupancy_moments_exact(n, n - z, "iid")
                mean_poi, _ = occupancy_moments_exact(n, n - z, "poisson")
                assert m < mean_iid
                assert m < mean_poi

    def test_too_small_n(self):
        with pytest.raises(ConfigurationError):
            target_m(4, 0.9)


class TestConditionalBayesRisk:
    def test_zero_when_enough_observed(self):
        assert conditional_bayes_risk(10, 2, 5, 5) == 0.0
        assert conditional_bayes_risk(10, 2, 5, 7) == 0.0

    def test_single_guess(self):
        assert conditional_bayes_risk(10, 2, 5, 4) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_impossible_success(self):
        assert conditional_bayes_risk(10, 2, 12, 4) == 1.0

    def test_occupancy_domain(self):
        with pytest.raises(DomainError):
            conditional_bayes_risk(10, 2, 5, 9)

    def test_matches_direct_product(self):
        # log-gamma route vs the plain product of ratios
        for n in (12, 20, 30):
            for z in range(1, n // 2 + 1):
                for m in range(1, n - z + 1):
                    for K in range(0, m, max(1, m // 3)):
                        direct = 1.0
                        for j in range(m - K):
                            direct *= (n - z - K - j) / (n - K - j)
                        got = conditional_bayes_risk(n, z, m, K)
                        assert got == pytest.approx(1.0 - direct, rel=1e-10, abs=1e-12)

    def test_nonincreasing_in_K(self):
        for n in (10, 17, 30):
            for z in (1, 3, n // 2):
                for m in (2, 5, n - z):
                    vals = [conditional_bayes_risk(n, z, m, K) for K in range(m + 1)]
                    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_matches_completion_enumeration(self):
        # the closed form must equal the enumerated average mistake rate
        for n, z, m, K in [(8, 2, 4, 2), (10, 3, 5, 1), (12, 4, 6, 3), (9, 2, 7, 4)]:
            oracle = completion_risk_oracle(n, z, m, K)
            assert conditional_bayes_risk(n, z, m, K) == pytest.approx(oracle, rel=1e-12)


class TestDecisionProblem:
    def test_zero_target_zero_risk(self):
        cfg = CounterexampleConfig(n=200, beta=0.6, zero_count=24, target_m=0)
        for model in ("iid", "poisson"):
            risk, short = run_decision_problem(model, cfg, method="exact")
            assert risk.mean == 0.0
            assert short.mean == 0.0

    def test_exact_poisson_vs_mc(self):
        cfg = CounterexampleConfig.standard(10**4, 0.6, reps=10**4, seed=0)
        risk_mc, short_mc = run_decision_problem("poisson", cfg, method="mc")
        assert risk_mc.exact is not None
        assert abs(risk_mc.mean - risk_mc.exact) <= 4.0 * max(risk_mc.stderr, 1e-9)
        assert abs(short_mc.mean - short_mc.exact) <= 4.0 * max(short_mc.stderr, 1e-9)

    def test_exact_iid_vs_mc(self):
        cfg = CounterexampleConfig.standard(1000, 0.6, reps=2 * 10**4, seed=0)
        risk_mc, short_mc = run_decision_problem("iid", cfg, method="mc")
        risk_ex, short_ex = run_decision_problem("iid", cfg, method="exact")
        assert abs(risk_mc.mean - risk_ex.mean) <= 4.0 * max(risk_mc.stderr, 1e-6)
        assert abs(short_mc.mean - short_ex.mean) <= 4.0 * max(short_mc.stderr, 1e-6)

    def test_risk_below_shortfall(self):
        for model in ("iid", "poisson"):
            cfg = CounterexampleConfig.standard(2000, 0.6)
            risk, short = run_decision_problem(model, cfg, method="exact")
            assert risk.mean <= short.mean + 1e-12

    def test_forced_small_support(self):
        # when naming m cells out of n-z = m possibilities, any shortfall
        # makes random completion nearly hopeless, so risk approaches P(K < m)
        n, m = 30, 10
        cfg = CounterexampleConfig(n=n, beta=0.6, zero_count=n - m, target_m=m)
        risk, short = run_decision_problem("iid", cfg, method="exact")
        assert risk.mean <= short.mean
        assert short.mean - risk.mean <= 0.05 * short.mean

    def test_auto_falls_back_to_mc(self):
        cfg = CounterexampleConfig.standard(200_000, 0.6, reps=50, seed=0)
        risk, short = run_decision_problem("iid", cfg)  # DP over budget
        assert short.reps == 50

    def test_budget_exceeded_without_reps(self):
        cfg = CounterexampleConfig.standard(200_000, 0.6, reps=0)
        with pytest.raises(ConfigurationError):
            run_decision_problem("iid", cfg)

    def test_single_op_wrappers_share_streams(self):
        cfg = CounterexampleConfig.standard(1000, 0.6, reps=500, seed=3)
        risk = bayes_risk("iid", cfg, method="mc")
        short = occupancy_shortfall_prob("iid", cfg, method="mc")
        joint_risk, joint_short = run_decision_problem("iid", cfg, method="mc")
        assert risk.mean == joint_risk.mean
        assert short.mean == joint_short.mean


class TestConfig:
    def test_invariants(self):
        with pytest.raises(ConfigurationError):
            CounterexampleConfig(n=100, beta=0.4, zero_count=10, target_m=5)
        with pytest.raises(ConfigurationError):
            CounterexampleConfig(n=100, beta=0.6, zero_count=0, target_m=5)
        with pytest.raises(ConfigurationError):
            CounterexampleConfig(n=100, beta=0.6, zero_count=15, target_m=90)

    def test_risk_estimate_invariants(self):
        with pytest.raises(ConfigurationError):
            RiskEstimate(mean=1.5, stderr=0.0, reps=1)
        with pytest.raises(ConfigurationError):
            RiskEstimate(mean=0.5, stderr=-1.0, reps=1)


class TestAsymptoticLimits:
    def test_against_series_oracle(self):
        lim_e, lim_f = asymptotic_limits()
        root_e = math.sqrt(math.e)
        assert lim_e == pytest.approx(normal_cdf_series(-root_e), abs=1e-10)
        assert lim_f == pytest.approx(
            normal_cdf_series(-root_e / math.sqrt(1 - math.exp(-1))), abs=1e-10
        )

    def test_displayed_values(self):
        lim_e, lim_f = asymptotic_limits()
        assert lim_e == pytest.approx(0.0496, abs=5e-4)
        assert lim_f == pytest.approx(0.01905, abs=5e-5)

    def test_ordering(self):
        lim_e, lim_f = asymptotic_limits()
        assert lim_f < lim_e
