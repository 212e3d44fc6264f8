"""Distances between densities: squared Hellinger, the scale-indexed
chi-square-like loss it sandwiches, the closed-form Hellinger distance
between Poisson process laws, and the auxiliary L2/sup distances.

Mixed-resolution pairs (dyadic truth against a histogram with an odd bin
count) are integrated exactly on the merged breakpoint grid.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .gridfn import as_gridfn, common_grid, integrate_map

__all__ = [
    "hellinger_sq",
    "ln_loss",
    "hellinger_sq_poisson",
    "l2_sq",
    "sup_dist",
    "METRICS",
    "evaluate_metric",
]


def _require_nonneg(f, name: str):
    g = as_gridfn(f)
    if (g.values < 0).any():
        raise DomainError(f"{name} must be nonnegative")
    return g


def hellinger_sq(f, g) -> float:
    """∫ (sqrt f - sqrt g)^2; symmetric, in [0,2] for a pair of densities."""
    f = _require_nonneg(f, "f")
    g = _require_nonneg(g, "g")
    return integrate_map(lambda u, v: (np.sqrt(u) - np.sqrt(v)) ** 2, f, g)


def ln_loss(f, g, n: float) -> float:
    """∫ (g-f)^2 / (f + g/sqrt(n)); cells with zero numerator contribute 0.

    The only way the denominator vanishes is f = g = 0, where the
    numerator vanishes too (0/0 := 0, the continuous extension).
    """
    if n < 1:
        raise DomainError(f"scale must be >= 1, got {n}")
    f = _require_nonneg(f, "f")
    g = _require_nonneg(g, "g")
    inv_sqrt_n = 1.0 / math.sqrt(n)

    def integrand(u, v):
        num = (v - u) ** 2
        den = u + inv_sqrt_n * v
        bad = (num > 0) & (den == 0)
        assert not bad.any(), "positive numerator over zero denominator"
        return np.where(num == 0, 0.0, num / np.where(den == 0, 1.0, den))

    return integrate_map(integrand, f, g)


def hellinger_sq_poisson(g_intensity, h_intensity) -> float:
    """Squared Hellinger distance between Poisson process laws:
    2(1 - exp(-1/2 ∫ (sqrt g - sqrt h)^2)) for intensities g, h."""
    return -2.0 * math.expm1(-0.5 * hellinger_sq(g_intensity, h_intensity))


def l2_sq(f, g) -> float:
    """∫ (f-g)^2."""
    return integrate_map(lambda u, v: (u - v) ** 2, f, g)


def sup_dist(f, g) -> float:
    """max over cells of |f - g| (the sup norm for piecewise constants)."""
    _, (u, v) = common_grid(f, g)
    return float(np.abs(u - v).max())


METRICS = ("ln", "hellinger2", "scaled-hellinger2", "l2", "sup")


def evaluate_metric(metric: str, f, g, n: float) -> float:
    """Dispatch by CLI metric name; ``scaled-hellinger2`` is sqrt(n)·H^2."""
    if metric == "ln":
        return ln_loss(f, g, n)
    if metric == "hellinger2":
        return hellinger_sq(f, g)
    if metric == "scaled-hellinger2":
        return math.sqrt(n) * hellinger_sq(f, g)
    if metric == "l2":
        return l2_sq(f, g)
    if metric == "sup":
        return sup_dist(f, g)
    raise DomainError(f"unknown metric {metric!r}; choose from {METRICS}")
