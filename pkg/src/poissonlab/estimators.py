"""Histogram density estimators: the raw fine-grid version and the
thresholded modification that zeroes suspiciously small bins and caps
large ones, plus the simple below-level truncation transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .experiments import BinCounts
from .gridfn import GridFunction, as_gridfn

__all__ = [
    "EstimatorConfig",
    "bin_resolution",
    "threshold_level",
    "raw_histogram",
    "threshold_histogram",
    "truncate_below",
]

MAX_CN = 1.0 / math.sqrt(2.0)  # keeps the zero and cap branches disjoint


@dataclass(frozen=True)
class EstimatorConfig:
    n: float
    k_n: int
    c_n: float

    def __post_init__(self):
        if self.k_n < 1:
            raise DomainError(f"need k_n >= 1, got {self.k_n}")
        if not 0 < self.c_n <= MAX_CN:
            raise DomainError(
                f"need 0 < c_n <= 1/sqrt(2) so 2*c_n <= 1/c_n, got {self.c_n}"
            )

    @classmethod
    def for_sample_size(cls, n: int) -> "EstimatorConfig":
        return cls(n=n, k_n=bin_resolution(n), c_n=threshold_level(n))


def bin_resolution(n: int) -> int:
    """Bin count ceil(n / (log n)^4); needs log n > 1, i.e. n >= 3."""
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    return math.ceil(n / math.log(n) ** 4)


def threshold_level(n: int) -> float:
    """Threshold 1/sqrt(log n); n >= 8 keeps it at or below 1/sqrt(2)."""
    if n < 8:
        raise DomainError(f"need n >= 8 so the threshold branches stay consistent, got {n}")
    return 1.0 / math.sqrt(math.log(n))


def raw_histogram(bc: BinCounts, n: float) -> GridFunction:
    """Fine-grid histogram (k/n)·N_j; unbiased for the cell averages of f.

    Uses the nominal scale n even under the Poisson model, where the
    realized point count is random.
    """
    if not n > 0:
        raise DomainError(f"scale must be positive, got {n}")
    return GridFunction(bc.k, (bc.k / n) * bc.counts)


def threshold_histogram(raw, c_n: float) -> GridFunction:
    """Zero bins below 2·c_n, cap bins above 1/c_n, keep the rest.

    Output values lie in {0} ∪ [2·c_n, 1/c_n]; the map is idempotent and
    monotone.
    """
    if not 0 < c_n <= MAX_CN:
        raise DomainError(f"need 0 < c_n <= 1/sqrt(2), got {c_n}")
    raw = as_gridfn(raw)
    v = raw.values
    out = np.where(v < 2.0 * c_n, 0.0, np.minimum(v, 1.0 / c_n))
    return GridFunction(raw.resolution, out)


def truncate_below(f_hat, eps: float) -> GridFunction:
    """Zero every cell with value below 2·eps; keep the rest unchanged."""
    if not eps > 0:
        raise DomainError(f"need eps > 0, got {eps}")
    f_hat = as_gridfn(f_hat)
    v = f_hat.values
    return GridFunction(f_hat.resolution, np.where(v >= 2.0 * eps, v, 0.0))
