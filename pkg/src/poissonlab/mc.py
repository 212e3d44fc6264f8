"""Deterministic, parallelizable Monte Carlo replication engine.

Replication i always runs on the generator derived from (seed, i), so a
result depends only on (task, reps, seed): execution order and worker
count cannot change it.  Stream derivation uses numpy's SeedSequence,
which hashes the (seed, stream) pair into the generator state; distinct
pairs give statistically independent streams.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["RngSpec", "McResult", "stream_rng", "map_streams", "run_mc"]

Z_95 = 1.96  # all campaigns here run enough reps for the normal interval


@dataclass(frozen=True)
class RngSpec:
    """Address of one replication stream: master seed plus stream index."""

    seed: int
    stream: int

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.stream]))


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Generator for replication ``stream`` under master ``seed``."""
    return RngSpec(seed, stream).generator()


@dataclass(frozen=True)
class McResult:
    mean: float
    stderr: float
    reps: int
    ci95: tuple[float, float]
    seed: int

    @classmethod
    def from_values(cls, values: np.ndarray, seed: int) -> "McResult":
        values = np.asarray(values, dtype=float)
        reps = values.size
        if reps < 1:
            raise ValueError("need at least one replication")
        mean = float(values.mean())
        stderr = 0.0 if reps == 1 else float(
            math.sqrt(values.var(ddof=1) / reps)
        )
        return cls(
            mean=mean,
            stderr=stderr,
            reps=reps,
            ci95=(mean - Z_95 * stderr, mean + Z_95 * stderr),
            seed=seed,
        )


def _call_task(task, seed, i):
    try:
        return float(task(stream_rng(seed, i)))
    except Exception as exc:
        raise RuntimeError(f"replication {i} failed: {exc}") from exc


def map_streams(
    task: Callable[[np.random.Generator], float],
    reps: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Evaluate ``task`` on streams (seed, 0..reps-1), in index order.

    The returned array is identical for any ``workers`` count; tasks must
    be pure functions of their generator (and picklable when workers > 1).
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if workers <= 1:
        return np.array([_call_task(task, seed, i) for i in range(reps)])
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, reps // (8 * workers))
        values = list(
            pool.map(_call_task, [task] * reps, [seed] * reps, range(reps),
                     chunksize=chunk)
        )
    return np.array(values)


def run_mc(
    task: Callable[[np.random.Generator], float],
    reps: int,
    seed: int,
    workers: int = 1,
) -> McResult:
    """Monte Carlo mean/stderr of ``task`` over ``reps`` seeded replications."""
    return McResult.from_values(map_streams(task, reps, seed, workers), seed)
