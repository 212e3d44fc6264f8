"""The interval-selection decision problem that separates fixed-n sampling
from its Poissonized companion.

The parameter family puts mass uniformly on all but z = floor(n^beta) of
the n cells of [0,1); the task is to name m cells where the density is
positive, losing 1 on any mistake.  Under the uniform prior the optimal
rule names observed occupied cells and completes the list at random, so
everything reduces to the occupancy count K: the Bayes risk is
E[risk(K)] and its leading term is P(K < m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom as _binom

from . import mc
from .errors import BudgetError, ConfigurationError, DomainError
from .experiments import IID_DP_BUDGET, occupancy_pmf_exact

__all__ = [
    "CounterexampleConfig",
    "RiskEstimate",
    "make_fbeta",
    "target_m",
    "conditional_bayes_risk",
    "bayes_risk",
    "occupancy_shortfall_prob",
    "run_decision_problem",
    "asymptotic_limits",
]


@dataclass(frozen=True)
class CounterexampleConfig:
    n: int
    beta: float
    zero_count: int
    target_m: int
    reps: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.5 < self.beta < 1.0:
            raise ConfigurationError(f"need 1/2 < beta < 1, got {self.beta}")
        if not 1 <= self.zero_count < self.n:
            raise ConfigurationError(
                f"need 1 <= zero_count < n, got z={self.zero_count}, n={self.n}"
            )
        if not 0 <= self.target_m <= self.n - self.zero_count:
            raise ConfigurationError(
                f"need 0 <= m <= n - z so a correct selection exists, "
                f"got m={self.target_m}, n-z={self.n - self.zero_count}"
            )

    @property
    def occupied_support(self) -> int:
        """Number of cells carrying mass (the boxes of the occupancy problem)."""
        return self.n - self.zero_count

    @classmethod
    def standard(cls, n: int, beta: float, reps: int = 0, seed: int = 0):
        """Config with z = floor(n^beta) and m from the mean-minus-sqrt(n) rule."""
        z = math.floor(n ** beta)
        return cls(n=n, beta=beta, zero_count=z,
                   target_m=target_m(n, beta), reps=reps, seed=seed)


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    stderr: float
    reps: int
    exact: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.mean <= 1.0:
            raise ConfigurationError(f"risk mean {self.mean} outside [0,1]")
        if self.stderr < 0:
            raise ConfigurationError(f"negative stderr {self.stderr}")


def make_fbeta(n: int, beta: float, zero_set=None,
               rng: np.random.Generator | None = None) -> np.ndarray:
    """Cell-mass vector of a family member: zero on z cells, 1/(n-z) elsewhere.

    ``zero_set`` holds 0-based cell indices; when omitted, ``rng`` draws it
    uniformly (the prior's draw).  Total mass is exactly one.
    """
    if not 0.5 < beta < 1.0:
        raise ConfigurationError(f"need 1/2 < beta < 1, got {beta}")
    z = math.floor(n ** beta)
    if not 1 <= z < n:
        raise ConfigurationError(f"zero count {z} must lie in 1..{n - 1}")
    if zero_set is None:
        if rng is None:
            raise ConfigurationError("provide either zero_set or rng")
        zero_set = rng.choice(n, size=z, replace=False)
    idx = np.asarray(list(zero_set), dtype=np.int64)
    if idx.size != z:
        raise ConfigurationError(f"zero_set has {idx.size} cells, expected {z}")
    if idx.size != np.unique(idx).size or idx.min() < 0 or idx.max() >= n:
        raise ConfigurationError("zero_set must be distinct cell indices in 0..n-1")
    masses = np.full(n, 1.0 / (n - z))
    masses[idx] = 0.0
    return masses


def target_m(n: int, beta: float) -> int:
    """floor(n(1-1/e) + z(-1+2/e) - sqrt(n)) with z = floor(n^beta).

    Sits one nominal standard deviation's worth (sqrt(n)) below the
    occupancy mean, where the two experiments' occupancy fluctuations
    separate the shortfall probabilities.
    """
    if n < 4:
        raise ConfigurationError(f"need n >= 4, got {n}")
    z = math.floor(n ** beta)
    m = math.floor(
        n * (1.0 - math.exp(-1.0)) + z * (-1.0 + 2.0 * math.exp(-1.0)) - math.sqrt(n)
    )
    if m < 1:
        raise ConfigurationError(f"m = {m} < 1: n too small for this regime")
    return m


def conditional_bayes_risk(n: int, z: int, m: int, K: int) -> float:
    """Expected loss of the optimal rule given the occupancy count K.

    Zero when K >= m.  Otherwise one minus the chance that m-K cells
    drawn without replacement from the n-K unnamed cells all avoid the
    z zero cells; the product of ratios is evaluated in log space via
    log-gamma so that hundreds of factors lose no precision.
    """
    if not 0 <= K <= n - z:
        raise DomainError(f"occupancy {K} outside 0..{n - z}")
    if K >= m:
        return 0.0
    if m - K > n - z - K:
        return 1.0
    log_success = (
        gammaln(n - z - K + 1) - gammaln(n - z - m + 1)
        - gammaln(n - K + 1) + gammaln(n - m + 1)
    )
    return float(-math.expm1(log_success))


def _risk_by_occupancy(cfg: CounterexampleConfig, ks: np.ndarray) -> np.ndarray:
    """conditional_bayes_risk over an integer vector of occupancy counts."""
    n, z, m = cfg.n, cfg.zero_count, cfg.target_m
    ks = np.asarray(ks, dtype=np.int64)
    out = np.zeros(ks.shape)
    low = ks < m
    if low.any():
        kk = ks[low]
        log_success = (
            gammaln(n - z - kk + 1) - gammaln(n - z - m + 1)
            - gammaln(n - kk + 1) + gammaln(n - m + 1)
        )
        out[low] = -np.expm1(log_success)
    return out


def _occupancy_pmf(cfg: CounterexampleConfig, model: str) -> np.ndarray:
    kp = cfg.occupied_support
    if model == "poisson":
        return occupancy_pmf_exact(cfg.n, kp, "poisson")
    if model == "iid":
        return occupancy_pmf_exact(cfg.n, kp, "iid")  # may raise BudgetError
    raise ConfigurationError(f"unknown model {model!r}")


def _exact_pair(cfg: CounterexampleConfig, model: str) -> tuple[float, float]:
    """(Bayes risk, P(K < m)) from the exact occupancy distribution."""
    m = cfg.target_m
    pmf = _occupancy_pmf(cfg, model)
    head = pmf[: min(m, len(pmf))]
    shortfall = float(head.sum())
    risk = float(np.dot(head, _risk_by_occupancy(cfg, np.arange(len(head)))))
    return min(risk, 1.0), min(shortfall, 1.0)


def _occupancy_task(cfg: CounterexampleConfig, model: str):
    """Per-replication task returning the simulated occupancy count.

    The iid branch throws n balls into the occupied-support cells and
    counts distinct landing cells in one bincount pass; point coordinates
    are never materialized since the risk depends only on K.  The poisson
    branch draws the occupied count directly from its Binomial law
    (cells are independent Poissons under Poissonization).
    """
    n, kp = cfg.n, cfg.occupied_support
    if model == "iid":
        def task(rng):
            cells = rng.integers(0, kp, size=n)
            return float(np.count_nonzero(np.bincount(cells, minlength=kp)))
        return task
    if model == "poisson":
        p = -math.expm1(-n / kp)
        def task(rng):
            return float(rng.binomial(kp, p))
        return task
    raise ConfigurationError(f"unknown model {model!r}")


def _mc_pair(cfg: CounterexampleConfig, model: str) -> tuple[RiskEstimate, RiskEstimate]:
    if cfg.reps < 1:
        raise ConfigurationError("Monte Carlo requested with reps = 0")
    ks = mc.map_streams(_occupancy_task(cfg, model), cfg.reps, cfg.seed).astype(np.int64)
    risks = _risk_by_occupancy(cfg, ks)
    hits = (ks < cfg.target_m).astype(float)
    risk = mc.McResult.from_values(risks, cfg.seed)
    short = mc.McResult.from_values(hits, cfg.seed)
    return (
        RiskEstimate(risk.mean, risk.stderr, risk.reps),
        RiskEstimate(short.mean, short.stderr, short.reps),
    )


def run_decision_problem(
    model: str, cfg: CounterexampleConfig, method: str = "auto"
) -> tuple[RiskEstimate, RiskEstimate]:
    """(Bayes risk, occupancy shortfall P(K < m)) for one experiment.

    method 'exact' forces the closed-form/DP route, 'mc' forces seeded
    replications (both estimates share the same occupancy draws), 'auto'
    prefers exact and falls back to Monte Carlo when the iid dynamic
    program is over budget.
    """
    if method not in ("auto", "exact", "mc"):
        raise ConfigurationError(f"unknown method {method!r}")
    exact: tuple[float, float] | None = None
    if method in ("auto", "exact"):
        try:
            exact = _exact_pair(cfg, model)
        except BudgetError:
            if method == "exact":
                raise
    if method == "mc" or (exact is None and cfg.reps >= 1):
        risk, short = _mc_pair(cfg, model)
        if model == "poisson":
            # exact reference is always available for the Binomial law
            ex = _exact_pair(cfg, "poisson")
            risk = RiskEstimate(risk.mean, risk.stderr, risk.reps, exact=ex[0])
            short = RiskEstimate(short.mean, short.stderr, short.reps, exact=ex[1])
        elif exact is not None:
            risk = RiskEstimate(risk.mean, risk.stderr, risk.reps, exact=exact[0])
            short = RiskEstimate(short.mean, short.stderr, short.reps, exact=exact[1])
        return risk, short
    if exact is None:
        raise ConfigurationError(
            f"iid occupancy DP over budget (n*kprime > {IID_DP_BUDGET}) and reps = 0"
        )
    r, s = exact
    return (
        RiskEstimate(r, 0.0, 0, exact=r),
        RiskEstimate(s, 0.0, 0, exact=s),
    )


def bayes_risk(model: str, cfg: CounterexampleConfig, method: str = "auto") -> RiskEstimate:
    """Bayes risk of the m-cell selection problem under the uniform prior."""
    return run_decision_problem(model, cfg, method)[0]


def occupancy_shortfall_prob(
    model: str, cfg: CounterexampleConfig, method: str = "auto"
) -> RiskEstimate:
    """P(K < m), the leading term of the Bayes risk."""
    return run_decision_problem(model, cfg, method)[1]


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def asymptotic_limits() -> tuple[float, float]:
    """Limiting shortfall probabilities (fixed-n experiment, Poissonized).

    Evaluates Phi(-sqrt(e)) and Phi(-sqrt(e)/sqrt(1 - 1/e)), the displayed
    normal limits of P(K < m) for the two experiments.
    """
    root_e = math.sqrt(math.e)
    return (
        normal_cdf(-root_e),
        normal_cdf(-root_e / math.sqrt(1.0 - math.exp(-1.0))),
    )
