"""Closed-form bound calculators and exact verifiers for the displayed
inequalities: the extra-observations bound, the Poisson-pair deficiency
bound, the superposition/neighborhood bounds, the Poisson tail bound,
and the 2/D^2 left-tail bound.

The Poisson CDF oracle sums the pmf recursively in log-safe form starting
at the tail boundary, so intensities up to 10^6 neither underflow nor lose
the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gridfn import as_gridfn, integrate_map
from .losses import hellinger_sq_poisson, ln_loss

__all__ = [
    "BoundReport",
    "make_report",
    "lecam_additional_obs_bound",
    "poisson_pair_bound",
    "superposition_check",
    "superposition_chain_check",
    "lemma3_neighborhood_bound",
    "in_neighborhood",
    "poisson_lower_tail",
    "poisson_upper_tail",
    "poisson_tail_check",
    "poisson_tail_check_upper",
    "poisson_tail_check_lower",
    "lemma2_tail_check",
]

HOLD_SLACK = 1e-12  # relative slack when comparing an exact lhs to its bound

# Relative sizes that terminate tail summation: individual term against the
# accumulated sum, and the geometric bound on everything not yet summed.
_TERM_TOL = 1e-18
_REMAINDER_TOL = 1e-15


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one inequality check: exact quantity against its bound."""

    lhs: float
    rhs: float
    holds: bool
    margin: float
    vacuous: bool = False


def make_report(lhs: float, rhs: float, trivial_cap: float | None = None) -> BoundReport:
    """Assemble a report; ``trivial_cap`` marks bounds beyond the trivial
    range of the bounded quantity (e.g. 2 for deficiency-type distances)
    as vacuous rather than hiding them."""
    holds = lhs <= rhs + HOLD_SLACK * max(1.0, abs(rhs))
    vacuous = trivial_cap is not None and rhs >= trivial_cap
    return BoundReport(lhs=lhs, rhs=rhs, holds=holds, margin=rhs - lhs, vacuous=vacuous)


def lecam_additional_obs_bound(r: int, beta_n: float) -> float:
    """sqrt(8 r beta_n): deficiency cost of r extra observations, given a
    caller-supplied minimax Hellinger risk figure beta_n."""
    if r < 0 or beta_n < 0:
        raise DomainError(f"need r >= 0 and beta_n >= 0, got r={r}, beta_n={beta_n}")
    return math.sqrt(8.0 * r * beta_n)


def poisson_pair_bound(n: float, m: float) -> float:
    """m/sqrt(2n): deficiency between Poisson scales n and n+m."""
    if not n > 0:
        raise DomainError(f"need n > 0, got {n}")
    if m < 0:
        raise DomainError(f"need m >= 0, got {m}")
    return m / math.sqrt(2.0 * n)


def _superposition_rhs(f, f0, n: float, m: float) -> float:
    """m^2/(n+m) ∫ (f-f0)^2 / (f + m f0/(n+m)), with 0/0 cells contributing 0."""
    w = m / (n + m)

    def integrand(u, v):
        num = (u - v) ** 2
        den = u + w * v
        return np.where(num == 0, 0.0, num / np.where(den == 0, 1.0, den))

    return m * m / (n + m) * integrate_map(integrand, f, f0)


def superposition_check(f, f0, n: float, m: float) -> BoundReport:
    """Exact Hellinger distance between the superposed process (intensity
    n·f + m·f0) and the target process ((n+m)·f) against its bound."""
    if not (n > 0 and m > 0):
        raise DomainError(f"need n, m > 0, got n={n}, m={m}")
    fg, f0g = as_gridfn(f), as_gridfn(f0)
    lhs = hellinger_sq_poisson(n * fg + m * f0g, (n + m) * fg)
    return make_report(lhs, _superposition_rhs(fg, f0g, n, m), trivial_cap=2.0)


def superposition_chain_check(f, f0, n: float, D: float, m: float | None = None) -> BoundReport:
    """Second link of the chain at m = D·sqrt(n): the superposition bound
    against 2 D^2 ∫ (f-f0)^2 / (f + f0/sqrt(n))."""
    if m is None:
        m = math.ceil(D * math.sqrt(n))
    lhs = _superposition_rhs(as_gridfn(f), as_gridfn(f0), n, m)
    rhs = 2.0 * D * D * ln_loss(f, f0, n)
    return make_report(lhs, rhs)


def lemma3_neighborhood_bound(D: float, c_n: float) -> float:
    """2 D sqrt(c_n): deficiency over the chi-square-type neighborhood.

    The derivation takes m = D sqrt(n) with D > 1, so smaller D is
    refused.
    """
    if not D > 1:
        raise DomainError(
            f"need D > 1 (the superposition argument assumes m = D*sqrt(n) "
            f"with D > 1), got {D}"
        )
    if c_n < 0:
        raise DomainError(f"need c_n >= 0, got {c_n}")
    return 2.0 * D * math.sqrt(c_n)


def in_neighborhood(f, f0, n: float, c_n: float) -> bool:
    """Exact membership test ∫ (f-f0)^2/(f + f0/sqrt(n)) <= c_n."""
    return ln_loss(f, f0, n) <= c_n


_STIRLING_SWITCH = 256


def _stirling_residual(k: int) -> float:
    """ln k! - (k ln k - k); Stirling series above the switch point."""
    if k <= _STIRLING_SWITCH:
        return math.lgamma(k + 1) - (k * math.log(k) - k)
    inv = 1.0 / k
    inv2 = inv * inv
    series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
    return 0.5 * math.log(2.0 * math.pi * k) + series


def _log_pmf(k: int, lam: float) -> float:
    # written so no pair of large terms cancels: naive k ln(lam) - lgamma
    # loses ~1e-9 of log accuracy already at lam ~ 1e6
    if k == 0:
        return -lam
    return k * math.log1p((lam - k) / k) + (k - lam) - _stirling_residual(k)


def _sum_tail(lam: float, start: int, step: int) -> float:
    """Sum the Poisson pmf from ``start`` outward (step +1 or -1).

    Caller guarantees the terms decay in that direction (start above the
    mean going up, below it going down), so the ratio test bounds the
    unsummed remainder geometrically.
    """
    term = math.exp(_log_pmf(start, lam))
    total = term
    k = start
    while term > 0.0:
        k += step
        if k < 0:
            break
        ratio = lam / k if step > 0 else (k + 1) / lam
        term *= ratio
        total += term
        if term <= _TERM_TOL * total and ratio < 1.0:
            if term * ratio / (1.0 - ratio) <= _REMAINDER_TOL * total:
                break
    return min(total, 1.0)


def poisson_upper_tail(lam: float, x: float) -> float:
    """Exact P(N >= x) for N ~ Poisson(lam)."""
    if not lam > 0:
        raise DomainError(f"need lam > 0, got {lam}")
    k0 = max(0, math.ceil(x))
    if k0 == 0:
        return 1.0
    if k0 > lam:
        return _sum_tail(lam, k0, +1)
    return 1.0 - _sum_tail(lam, k0 - 1, -1)


def poisson_lower_tail(lam: float, x: float) -> float:
    """Exact P(N <= x) for N ~ Poisson(lam)."""
    if not lam > 0:
        raise DomainError(f"need lam > 0, got {lam}")
    k0 = math.floor(x)
    if k0 < 0:
        return 0.0
    if k0 < lam:
        return _sum_tail(lam, k0, -1)
    return 1.0 - _sum_tail(lam, k0 + 1, +1)


def _tail_rhs(lam: float, m0: float) -> float:
    return math.exp(-(m0 ** 3) / (m0 + lam) ** 2)


def poisson_tail_check_upper(lam: float, m0: float) -> BoundReport:
    """P(N - lam >= m0) against exp(-m0^3/(m0+lam)^2) (the proven form)."""
    if not (lam > 0 and m0 > 0):
        raise DomainError(f"need lam, m0 > 0, got lam={lam}, m0={m0}")
    return make_report(poisson_upper_tail(lam, lam + m0), _tail_rhs(lam, m0),
                       trivial_cap=1.0)


def poisson_tail_check_lower(lam: float, m0: float) -> BoundReport:
    """P(N - lam <= -m0) against the same bound (the proven form)."""
    if not (lam > 0 and m0 > 0):
        raise DomainError(f"need lam, m0 > 0, got lam={lam}, m0={m0}")
    return make_report(poisson_lower_tail(lam, lam - m0), _tail_rhs(lam, m0),
                       trivial_cap=1.0)


def poisson_tail_check(lam: float, m0: float) -> BoundReport:
    """Two-sided P(|N - lam| >= m0) against exp(-m0^3/(m0+lam)^2).

    This is the stated form; the proof only establishes each one-sided
    tail, so a violation here is a reportable finding rather than an
    arithmetic error.
    """
    if not (lam > 0 and m0 > 0):
        raise DomainError(f"need lam, m0 > 0, got lam={lam}, m0={m0}")
    lhs = poisson_upper_tail(lam, lam + m0) + poisson_lower_tail(lam, lam - m0)
    return make_report(lhs, _tail_rhs(lam, m0), trivial_cap=1.0)


def lemma2_tail_check(n: int, D: float) -> BoundReport:
    """Exact P(Poisson(n + ceil(D sqrt(n))) <= n-1) against 2/D^2."""
    if n < 1 or not D > 0:
        raise DomainError(f"need n >= 1 and D > 0, got n={n}, D={D}")
    lam = n + math.ceil(D * math.sqrt(n))
    return make_report(poisson_lower_tail(lam, n - 1), 2.0 / (D * D),
                       trivial_cap=1.0)
