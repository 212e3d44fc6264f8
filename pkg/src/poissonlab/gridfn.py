"""Piecewise-constant functions on uniform partitions of [0,1).

All functions in this package live on a uniform grid of k cells
[(j-1)/k, j/k).  Because every object is piecewise constant, integrals of
pointwise maps are finite sums and therefore exact up to float roundoff.
Dyadic resolutions (powers of two) get the full ladder machinery; other
resolutions (histogram bin counts) are carried as-is and refused by the
dyadic-only operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, EvaluationError, ResolutionMismatchError

__all__ = [
    "GridFunction",
    "Density",
    "as_gridfn",
    "average_operator",
    "coarsen",
    "refine",
    "common_grid",
    "integrate_map",
    "read_gridfn",
    "write_gridfn",
]

# Constructors renormalize a density whose integral is off by at most this
# much; anything worse is rejected as genuinely wrong input.
DENSITY_RENORM_TOL = 1e-6
DENSITY_INTEGRAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A real function constant on each of ``resolution`` equal cells of [0,1).

    ``values[j]`` is the value on [j/k, (j+1)/k).  Instances are immutable
    (the backing array is locked) and safe to share across threads.
    """

    resolution: int
    values: np.ndarray

    def __post_init__(self):
        k = self.resolution
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise DomainError(f"resolution must be a positive integer, got {k!r}")
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.shape != (k,):
            raise DomainError(
                f"expected {k} cell values, got array of shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DomainError(f"non-finite value in cell {bad}")
        arr.flags.writeable = False
        object.__setattr__(self, "resolution", int(k))
        object.__setattr__(self, "values", arr)

    @property
    def is_dyadic(self) -> bool:
        return self.resolution & (self.resolution - 1) == 0

    def integral(self) -> float:
        """Exact Lebesgue integral over [0,1)."""
        return float(self.values.mean())

    def __add__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        k = math.lcm(self.resolution, other.resolution)
        return GridFunction(
            k, refine(self, k).values + refine(other, k).values
        )

    def __sub__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self + (-1.0) * other

    def __mul__(self, c):
        if not isinstance(c, (int, float, np.floating, np.integer)):
            return NotImplemented
        return GridFunction(self.resolution, self.values * float(c))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Density:
    """A nonnegative GridFunction integrating to one.

    The constructor renormalizes inputs whose integral is within
    ``DENSITY_RENORM_TOL`` of one and rejects anything further away.
    """

    grid: GridFunction

    def __post_init__(self):
        g = self.grid
        if not isinstance(g, GridFunction):
            g = GridFunction(len(g), g)
        if (g.values < 0).any():
            bad = int(np.flatnonzero(g.values < 0)[0])
            raise DomainError(f"density value is negative in cell {bad}")
        total = g.integral()
        if abs(total - 1.0) > DENSITY_RENORM_TOL:
            raise DomainError(
                f"density integrates to {total!r}, beyond the renormalization "
                f"tolerance {DENSITY_RENORM_TOL}"
            )
        if total != 1.0:
            g = GridFunction(g.resolution, g.values / total)
        object.__setattr__(self, "grid", g)
        assert abs(self.grid.integral() - 1.0) <= DENSITY_INTEGRAL_TOL

    @property
    def resolution(self) -> int:
        return self.grid.resolution

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    @classmethod
    def from_values(cls, values) -> "Density":
        values = np.asarray(values, dtype=float)
        return cls(GridFunction(len(values), values))


def as_gridfn(f) -> GridFunction:
    """Coerce a GridFunction or Density to a GridFunction."""
    if isinstance(f, Density):
        return f.grid
    if isinstance(f, GridFunction):
        return f
    raise TypeError(f"expected GridFunction or Density, got {type(f).__name__}")


def _check_divides(kprime: int, resolution: int):
    if kprime < 1 or resolution % kprime != 0:
        raise ResolutionMismatchError(
            f"coarse resolution {kprime} does not divide {resolution}"
        )


def average_operator(f, j: int, kprime: int) -> float:
    """Cell average on the j-th of ``kprime`` equal cells (j is 1-based).

    Equals kprime times the integral of f over [(j-1)/kprime, j/kprime),
    computed exactly as the arithmetic mean of the covered fine cells.
    """
    f = as_gridfn(f)
    _check_divides(kprime, f.resolution)
    if not 1 <= j <= kprime:
        raise IndexError(f"cell index {j} out of range 1..{kprime}")
    r = f.resolution // kprime
    return float(f.values[(j - 1) * r : j * r].mean())


def coarsen(f, kprime: int) -> GridFunction:
    """Project onto the coarser ``kprime``-cell grid by cell averaging.

    Preserves the integral exactly; coarsening to f.resolution is the
    identity.
    """
    f = as_gridfn(f)
    _check_divides(kprime, f.resolution)
    if kprime == f.resolution:
        return f
    blocks = f.values.reshape(kprime, f.resolution // kprime)
    return GridFunction(kprime, blocks.mean(axis=1))


def refine(f, kfine: int) -> GridFunction:
    """Embed f on a finer grid by value replication (no-op as a function)."""
    f = as_gridfn(f)
    if kfine < f.resolution or kfine % f.resolution != 0:
        raise ResolutionMismatchError(
            f"fine resolution {kfine} is not a multiple of {f.resolution}"
        )
    if kfine == f.resolution:
        return f
    return GridFunction(kfine, np.repeat(f.values, kfine // f.resolution))


def common_grid(*fs) -> tuple[np.ndarray, list[np.ndarray]]:
    """Align piecewise-constant functions on their merged breakpoint grid.

    Returns ``(widths, columns)`` where ``widths[c]`` is the exact Lebesgue
    measure of merged cell c and ``columns[i][c]`` is the i-th function's
    value there.  Breakpoints are merged in integer arithmetic (units of
    1/lcm of the resolutions), so cell identification is exact even for
    non-dyadic resolutions; the number of merged cells is at most the sum
    of the input resolutions.
    """
    grids = [as_gridfn(f) for f in fs]
    if not grids:
        raise DomainError("common_grid needs at least one function")
    ks = [g.resolution for g in grids]
    if len(set(ks)) == 1:
        k = ks[0]
        widths = np.full(k, 1.0 / k)
        return widths, [g.values for g in grids]
    L = math.lcm(*ks)
    cuts = np.unique(np.concatenate(
        [np.arange(k, dtype=np.int64) * (L // k) for k in ks] + [[L]]
    ))
    lefts = cuts[:-1]
    widths = np.diff(cuts) / L
    columns = [g.values[lefts // (L // g.resolution)] for g in grids]
    return widths, columns


def integrate_map(phi: Callable, *fs) -> float:
    """Exact integral of phi(f1(x), ..., fr(x)) over [0,1).

    ``phi`` must accept numpy arrays (one per function, aligned on the
    merged grid) and map them elementwise.  Exactness holds because all
    inputs are piecewise constant: the integral is a finite weighted sum.
    A non-finite value on any merged cell raises EvaluationError naming
    the cell.
    """
    widths, columns = common_grid(*fs)
    with np.errstate(all="ignore"):
        vals = np.asarray(phi(*columns), dtype=float)
    if vals.shape != widths.shape:
        raise EvaluationError(
            f"map returned shape {vals.shape}, expected {widths.shape}"
        )
    if not np.isfinite(vals).all():
        c = int(np.flatnonzero(~np.isfinite(vals))[0])
        left = float(np.concatenate(([0.0], np.cumsum(widths)))[c])
        raise EvaluationError(
            f"map produced {vals[c]!r} on cell {c} starting at x={left:.6g}"
        )
    return float(np.dot(widths, vals))


def read_gridfn(path) -> GridFunction:
    """Load the text format: line ``resolution=<k>`` then k decimal values."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("resolution="):
            raise DomainError(f"{path}: expected 'resolution=<k>' header")
        k = int(header.split("=", 1)[1])
        values = [float(tok) for tok in fh.read().split()]
    if len(values) != k:
        raise DomainError(f"{path}: expected {k} values, found {len(values)}")
    return GridFunction(k, np.array(values))


def write_gridfn(f, path):
    f = as_gridfn(f)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"resolution={f.resolution}\n")
        fh.write(" ".join(format(v, ".17g") for v in f.values) + "\n")
