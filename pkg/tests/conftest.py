"""Shared oracles for the test suite.

These deliberately take different routes than the package code (direct
series, finite sums over math.comb, brute-force enumeration) so each
check has two independent sides.
"""

import math

import numpy as np
import pytest


def normal_cdf_series(x: float, terms: int = 50) -> float:
    """Standard normal CDF from the Maclaurin series
    Phi(x) = 1/2 + phi(x) * sum_k x^(2k+1) / (1*3*...*(2k+1)).
    Accurate far beyond 1e-10 for |x| <= 3 with 50 terms.
    """
    phi = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    total = 0.0
    term = x
    for k in range(terms):
        total += term
        term *= x * x / (2 * k + 3)
    return 0.5 + phi * total


def binom_pmf_exact(j: int, k: int, p: float) -> float:
    return math.comb(k, j) * p**j * (1.0 - p) ** (k - j)


def poisson_pmf_direct(j: int, lam: float) -> float:
    return math.exp(j * math.log(lam) - lam - math.lgamma(j + 1))


def poisson_cdf_direct(x: int, lam: float) -> float:
    """Plain left-to-right pmf sum; fine for the moderate lambdas used
    as oracle points."""
    if x < 0:
        return 0.0
    return math.fsum(poisson_pmf_direct(j, lam) for j in range(int(x) + 1))


def enumerate_occupancy_pmf(n: int, k: int) -> np.ndarray:
    """Exact occupancy pmf by enumerating all k^n equally likely
    assignments of n balls to k boxes."""
    pmf = np.zeros(min(n, k) + 1)
    for code in range(k**n):
        seen = set()
        c = code
        for _ in range(n):
            seen.add(c % k)
            c //= k
        pmf[len(seen)] += 1
    return pmf / k**n


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
