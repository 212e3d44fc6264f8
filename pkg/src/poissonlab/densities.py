"""Built-in test densities and random density generators.

Built-ins cover the regimes the thresholded estimator has to handle:
flat (uniform), a jump (halfstep), a kink with values near zero at the
edges (tent), and an interior dead zone (withzero).  Each is the exact
cell-average projection of its ideal shape, computed in rational
arithmetic so straddled boundaries introduce no float fuzz.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DomainError
from .gridfn import Density, GridFunction

__all__ = ["BUILTIN_DENSITIES", "builtin_density", "random_density"]


def _overlap(a: Fraction, b: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return max(Fraction(0), min(b, hi) - max(a, lo))


def _uniform(k: int) -> np.ndarray:
    return np.ones(k)


def _halfstep(k: int) -> np.ndarray:
    # cell averages of 2·1_{[0,1/2)}
    half = Fraction(1, 2)
    vals = [
        2 * _overlap(Fraction(j, k), Fraction(j + 1, k), Fraction(0), half) * k
        for j in range(k)
    ]
    return np.array([float(v) for v in vals])


def _tent_antiderivative(x: Fraction) -> Fraction:
    # antiderivative of min(4x, 4(1-x)), which integrates to 1 on [0,1]
    if x <= Fraction(1, 2):
        return 2 * x * x
    return 4 * x - 2 * x * x - 1


def _tent(k: int) -> np.ndarray:
    vals = [
        (_tent_antiderivative(Fraction(j + 1, k)) - _tent_antiderivative(Fraction(j, k))) * k
        for j in range(k)
    ]
    return np.array([float(v) for v in vals])


def _withzero(k: int) -> np.ndarray:
    # value 0 on [0.4, 0.6), 1.25 elsewhere
    lo, hi = Fraction(2, 5), Fraction(3, 5)
    vals = [
        Fraction(5, 4) * (1 - _overlap(Fraction(j, k), Fraction(j + 1, k), lo, hi) * k)
        for j in range(k)
    ]
    return np.array([float(v) for v in vals])


BUILTIN_DENSITIES = {
    "uniform": _uniform,
    "halfstep": _halfstep,
    "tent": _tent,
    "withzero": _withzero,
}


def builtin_density(name: str, resolution: int) -> Density:
    """A named test density projected to ``resolution`` cells."""
    try:
        maker = BUILTIN_DENSITIES[name]
    except KeyError:
        raise DomainError(
            f"unknown density {name!r}; choose from {sorted(BUILTIN_DENSITIES)}"
        ) from None
    return Density(GridFunction(resolution, maker(resolution)))


def random_density(resolution: int, rng: np.random.Generator) -> Density:
    """Random positive density: uniform cell values normalized to mass one."""
    vals = rng.random(resolution) + 1e-3
    return Density(GridFunction(resolution, vals / vals.mean()))
