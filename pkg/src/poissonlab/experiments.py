"""Samplers for the fixed-n and Poissonized experiments, plus occupancy.

Points live in the half-open interval [0,1) so binning is unambiguous.
Occupancy helpers work on raw point sequences with arbitrary bin counts
(the decision-problem grids are usually not powers of two).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom as _binom

from .errors import BudgetError, DomainError
from .gridfn import as_gridfn

__all__ = [
    "IidSample",
    "PoissonSample",
    "BinCounts",
    "sample_iid",
    "sample_poisson_process",
    "bin_counts",
    "occupancy",
    "occupancy_moments_exact",
    "occupancy_pmf_exact",
    "occupancy_cdf_exact",
    "superpose",
    "IID_DP_BUDGET",
]

# n * kprime beyond this refuses the exact occupancy dynamic program.
IID_DP_BUDGET = 10**8


@dataclass(frozen=True)
class IidSample:
    n: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (self.n,):
            raise DomainError(f"expected {self.n} points, got shape {pts.shape}")
        if pts.size and (pts.min() < 0.0 or pts.max() >= 1.0):
            raise DomainError("points must lie in [0,1)")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class PoissonSample:
    intensity_total: float
    points: np.ndarray

    def __post_init__(self):
        if self.intensity_total < 0:
            raise DomainError("total intensity must be nonnegative")
        pts = np.asarray(self.points, dtype=float)
        if pts.size and (pts.min() < 0.0 or pts.max() >= 1.0):
            raise DomainError("points must lie in [0,1)")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return int(self.points.size)


@dataclass(frozen=True)
class BinCounts:
    k: int
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (self.k,):
            raise DomainError(f"expected {self.k} counts, got shape {c.shape}")
        if (c < 0).any():
            raise DomainError("counts must be nonnegative")
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _draw_points(values: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws from the density proportional to ``values`` (cell masses).

    Inverse-CDF on the cell level: pick a cell with probability equal to
    its mass, then place the point uniformly inside.  Exact for piecewise
    constants; zero-mass cells are never selected.
    """
    k = values.size
    if n == 0:
        return np.empty(0)
    cum = np.cumsum(values / k)
    u = rng.random(n) * cum[-1]
    cells = np.minimum(np.searchsorted(cum, u, side="right"), k - 1)
    return (cells + rng.random(n)) / k


def sample_iid(f, n: int, rng: np.random.Generator) -> IidSample:
    """n i.i.d. points from the density f."""
    if n < 0:
        raise DomainError(f"sample size must be nonnegative, got {n}")
    g = as_gridfn(f)
    return IidSample(n, _draw_points(g.values, n, rng))


def sample_poisson_process(f, n: float, rng: np.random.Generator) -> PoissonSample:
    """Poisson process on [0,1) with intensity n·f.

    Draws N ~ Poisson(n·∫f) and then N i.i.d. points from f/∫f.  ``f``
    may be any nonnegative GridFunction; a non-unit integral simply
    rescales the total intensity (useful for superposition inputs).
    """
    if not n > 0:
        raise DomainError(f"scale must be positive, got {n}")
    g = as_gridfn(f)
    if (g.values < 0).any():
        raise DomainError("intensity must be nonnegative")
    lam = n * g.integral()
    count = int(rng.poisson(lam))
    return PoissonSample(lam, _draw_points(g.values, count, rng))


def bin_counts(points, k: int) -> BinCounts:
    """Occupation counts of the k equal cells of [0,1)."""
    if k < 1:
        raise DomainError(f"need at least one bin, got {k}")
    pts = np.asarray(points, dtype=float)
    idx = np.minimum((pts * k).astype(np.int64), k - 1)
    return BinCounts(k, np.bincount(idx, minlength=k))


def occupancy(bc: BinCounts) -> int:
    """Number of bins containing at least one observation."""
    return int(np.count_nonzero(bc.counts))


def occupancy_moments_exact(n, kprime: int, model: str) -> tuple[float, float]:
    """Mean and variance of the occupied count over kprime equiprobable cells.

    poisson: cells are independent Poisson(n/kprime), so the occupied count
    is Binomial(kprime, 1 - e^{-n/kprime}).
    iid: classical occupancy of n balls in kprime boxes.
    """
    if kprime < 1:
        raise DomainError(f"need kprime >= 1, got {kprime}")
    if model == "poisson":
        p = -math.expm1(-n / kprime)
        return kprime * p, kprime * p * (1.0 - p)
    if model == "iid":
        q1 = (1.0 - 1.0 / kprime) ** n
        mean = kprime * (1.0 - q1)
        var = kprime * q1 * (1.0 - q1) + kprime * (kprime - 1) * (
            (1.0 - 2.0 / kprime) ** n - q1 * q1
        )
        return mean, var
    raise DomainError(f"unknown model {model!r}")


def occupancy_pmf_exact(n, kprime: int, model: str) -> np.ndarray:
    """Exact pmf of the occupied count; index j is P(K = j).

    The iid case runs the ball-by-ball dynamic program (occupied count is
    a Markov chain stepping up with probability (kprime-K)/kprime), which
    is refused beyond IID_DP_BUDGET work.
    """
    if kprime < 1:
        raise DomainError(f"need kprime >= 1, got {kprime}")
    if model == "poisson":
        p = -math.expm1(-n / kprime)
        return _binom.pmf(np.arange(kprime + 1), kprime, p)
    if model != "iid":
        raise DomainError(f"unknown model {model!r}")
    n = int(n)
    if n * kprime > IID_DP_BUDGET:
        raise BudgetError(
            f"iid occupancy DP needs n*kprime = {n * kprime} > {IID_DP_BUDGET}; "
            "use Monte Carlo"
        )
    kmax = min(n, kprime)
    pmf = np.zeros(kmax + 1)
    pmf[0] = 1.0
    ks = np.arange(kmax + 1, dtype=float)
    stay = ks / kprime
    grow = (kprime - ks) / kprime
    for _ in range(n):
        nxt = pmf * stay
        nxt[1:] += pmf[:-1] * grow[:-1]
        pmf = nxt
    return pmf


def occupancy_cdf_exact(n, kprime: int, j: int, model: str) -> float:
    """Exact P(K <= j) for the occupied count K."""
    if model == "poisson":
        p = -math.expm1(-n / kprime)
        return float(_binom.cdf(j, kprime, p))
    pmf = occupancy_pmf_exact(n, kprime, model)
    if j < 0:
        return 0.0
    return float(pmf[: min(j, len(pmf) - 1) + 1].sum())


def superpose(a: PoissonSample, b: PoissonSample) -> PoissonSample:
    """Merge two independent Poisson processes (intensities add)."""
    return PoissonSample(
        a.intensity_total + b.intensity_total,
        np.concatenate([a.points, b.points]),
    )
