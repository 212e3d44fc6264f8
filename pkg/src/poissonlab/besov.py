"""Besov norms on the dyadic ladder and the companion approximation bounds.

The norm of a resolution-2^J function truncates the ladder at i = J-1,
which is exact: coarsening beyond the native resolution changes nothing.
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResolutionMismatchError
from .gridfn import as_gridfn, coarsen, integrate_map, refine

__all__ = [
    "BesovParams",
    "besov_norm",
    "in_ball",
    "approximation_lp_error",
    "approximation_bound_rhs",
    "exceedance_measure",
    "condition15_rhs",
]


@dataclass(frozen=True)
class BesovParams:
    """Smoothness alpha, integrability p, ladder exponent q, ball radius M."""

    alpha: float
    p: float
    q: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.p < 1 or self.q < 1:
            raise DomainError(f"need p >= 1 and q >= 1, got p={self.p}, q={self.q}")
        if not self.M > 0:
            raise DomainError(f"ball radius must be positive, got {self.M}")


def _dyadic_level(f):
    f = as_gridfn(f)
    if not f.is_dyadic:
        raise ResolutionMismatchError(
            f"resolution {f.resolution} is not a power of two"
        )
    return f, f.resolution.bit_length() - 1


def lp_norm(g, p: float) -> float:
    """L^p([0,1]) norm of a piecewise-constant function."""
    return integrate_map(lambda u: np.abs(u) ** p, g) ** (1.0 / p)


def besov_norm(f, params: BesovParams) -> float:
    """Ladder norm: {|∫f|^q + sum_i (2^{i·alpha} ||f̄_(2^{i+1}) - f̄_(2^i)||_p)^q}^{1/q}."""
    f, J = _dyadic_level(f)
    alpha, p, q = params.alpha, params.p, params.q
    terms = [abs(f.integral()) ** q]
    for i in range(J):
        fine = coarsen(f, 2 ** (i + 1))
        diff = fine - refine(coarsen(f, 2 ** i), 2 ** (i + 1))
        terms.append((2.0 ** (i * alpha) * lp_norm(diff, p)) ** q)
    return math.fsum(terms) ** (1.0 / q)


def in_ball(f, params: BesovParams) -> bool:
    """Membership in the ball of radius ``params.M``."""
    return besov_norm(f, params) <= params.M


def approximation_lp_error(f, k: int, p: float) -> float:
    """Exact ∫ |f - f̄_(k)|^p."""
    if p < 1:
        raise DomainError(f"need p >= 1, got {p}")
    f = as_gridfn(f)
    fbar = refine(coarsen(f, k), f.resolution)
    return integrate_map(lambda u, v: np.abs(u - v) ** p, f, fbar)


def approximation_bound_rhs(params: BesovParams, k: int, p: float | None = None) -> float:
    """Claimed cap on approximation_lp_error: (M·2^a/(2^a - 1))^p / k^{a·p}."""
    if p is None:
        p = params.p
    a = params.alpha
    m1 = params.M * 2.0 ** a / (2.0 ** a - 1.0)
    return m1 ** p / k ** (a * p)


def exceedance_measure(f, k: int, t: float) -> float:
    """Lebesgue measure of {x : |f(x) - f̄_(k)(x)| > t}."""
    if not t > 0:
        raise DomainError(f"threshold must be positive, got {t}")
    f = as_gridfn(f)
    fbar = refine(coarsen(f, k), f.resolution)
    exceed = np.abs(f.values - fbar.values) > t
    return float(np.count_nonzero(exceed)) / f.resolution


def condition15_rhs(params: BesovParams, k: int, M1_override: float | None = None) -> float:
    """Chebyshev cap on the exceedance at threshold 1/sqrt(log k).

    Returns M1^p · k^{-a·p} · (log k)^{p/2} with M1 = M·2^a/(2^a - 1)
    unless overridden.  Needs k >= 2 so that log k is positive.
    """
    if k < 2:
        raise DomainError(f"need k >= 2 (log k must be positive), got {k}")
    a, p = params.alpha, params.p
    m1 = M1_override if M1_override is not None else params.M * 2.0 ** a / (2.0 ** a - 1.0)
    return m1 ** p * k ** (-a * p) * math.log(k) ** (p / 2.0)
