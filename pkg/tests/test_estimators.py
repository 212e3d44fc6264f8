import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poissonlab.errors import DomainError
from poissonlab.estimators import (
    EstimatorConfig,
    bin_resolution,
    raw_histogram,
    threshold_histogram,
    threshold_level,
    truncate_below,
)
from poissonlab.experiments import BinCounts, bin_counts, sample_iid, sample_poisson_process
from poissonlab.gridfn import Density, GridFunction
from poissonlab.mc import stream_rng


class TestBinResolution:
    def test_million(self):
        assert bin_resolution(10**6) == 28

    def test_pow2_16(self):
        assert bin_resolution(65536) == 5

    def test_monotone_on_grid(self):
        grid = np.unique(np.logspace(3, 7, 60).astype(int))
        vals = [bin_resolution(int(n)) for n in grid]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            bin_resolution(2)


class TestThresholdLevel:
    def test_million(self):
        assert threshold_level(10**6) == pytest.approx(0.26904, abs=1e-5)

    def test_near_e4(self):
        assert threshold_level(55) == pytest.approx(1.0 / math.sqrt(math.log(55)), rel=1e-15)
        assert threshold_level(55) == pytest.approx(0.5, abs=6e-4)

    def test_decreasing(self):
        ns = [8, 16, 100, 10**4, 10**8]
        vals = [threshold_level(n) for n in ns]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            threshold_level(7)


class TestEstimatorConfig:
    def test_from_sample_size(self):
        cfg = EstimatorConfig.for_sample_size(10**6)
        assert cfg.k_n == 28
        assert cfg.c_n == pytest.approx(0.26904, abs=1e-5)

    def test_rejects_inconsistent_threshold(self):
        with pytest.raises(DomainError):
            EstimatorConfig(n=100, k_n=4, c_n=0.8)
        with pytest.raises(DomainError):
            EstimatorConfig(n=100, k_n=0, c_n=0.3)


class TestRawHistogram:
    def test_zero_counts(self):
        f = raw_histogram(BinCounts(3, [0, 0, 0]), 10)
        assert np.array_equal(f.values, [0.0, 0.0, 0.0])

    def test_direct_formula(self):
        f = raw_histogram(BinCounts(2, [3, 1]), 4)
        assert np.array_equal(f.values, [1.5, 0.5])

    @pytest.mark.parametrize("model", ["iid", "poisson"])
    def test_unbiased_for_cell_averages(self, model):
        n, k, reps = 1000, 4, 10_000
        truth = Density.from_values([1.0, 1.0, 1.0, 1.0])
        acc = np.zeros(k)
        acc2 = np.zeros(k)
        for i in range(reps):
            rng = stream_rng(8, i)
            pts = (sample_iid(truth, n, rng).points if model == "iid"
                   else sample_poisson_process(truth, n, rng).points)
            v = raw_histogram(bin_counts(pts, k), n).values
            acc += v
            acc2 += v * v
        mean = acc / reps
        se = np.sqrt((acc2 / reps - mean**2) / reps)
        assert (np.abs(mean - 1.0) <= 4.0 * se).all()


class TestThresholdHistogram:
    def test_rule_at_quarter(self):
        raw = GridFunction(4, [0.4, 0.6, 5.0, 0.0])
        out = threshold_histogram(raw, 0.25)
        assert np.array_equal(out.values, [0.0, 0.6, 4.0, 0.0])

    def test_zero_function_fixed(self):
        out = threshold_histogram(GridFunction(2, [0.0, 0.0]), 0.3)
        assert np.array_equal(out.values, [0.0, 0.0])

    def test_idempotent(self, rng):
        raw = GridFunction(64, rng.exponential(size=64))
        once = threshold_histogram(raw, 0.2)
        twice = threshold_histogram(once, 0.2)
        assert np.array_equal(once.values, twice.values)

    def test_range(self, rng):
        c = 0.3
        out = threshold_histogram(GridFunction(128, 3.0 * rng.random(128)), c)
        v = out.values
        assert ((v == 0.0) | ((v >= 2 * c) & (v <= 1 / c))).all()

    @given(st.floats(0.01, 0.7), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_monotone_map(self, c, seed):
        g = np.random.default_rng(seed)
        a = g.exponential(size=16)
        b = a + g.random(16)
        fa = threshold_histogram(GridFunction(16, a), c).values
        fb = threshold_histogram(GridFunction(16, b), c).values
        assert (fa <= fb + 1e-15).all()

    def test_domain(self):
        with pytest.raises(DomainError):
            threshold_histogram(GridFunction(1, [1.0]), 0.8)


class TestTruncateBelow:
    def test_keeps_large(self):
        f = GridFunction(2, [1.0, 1.0])
        assert np.array_equal(truncate_below(f, 0.4).values, [1.0, 1.0])

    def test_zeroes_small(self):
        f = GridFunction(2, [1.0, 1.0])
        assert np.array_equal(truncate_below(f, 0.6).values, [0.0, 0.0])

    def test_mixed(self):
        f = GridFunction(2, [0.5, 1.5])
        assert np.array_equal(truncate_below(f, 0.4).values, [0.0, 1.5])

    def test_monotone(self, rng):
        a = rng.random(32)
        b = a + rng.random(32)
        ta = truncate_below(GridFunction(32, a), 0.25).values
        tb = truncate_below(GridFunction(32, b), 0.25).values
        assert (ta <= tb).all()
