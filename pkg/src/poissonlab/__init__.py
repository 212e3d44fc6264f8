"""poissonlab: desk-scale numerics for fixed-n sampling vs Poissonization.

Exact piecewise-constant function arithmetic, ladder (Besov-type) norms,
seeded samplers for the two experiments, occupancy laws, histogram
estimators, Hellinger/chi-square-type losses, and verifiers for the
displayed deficiency and tail bounds.
"""

__version__ = "0.1.0"

from .besov import (
    BesovParams,
    approximation_bound_rhs,
    approximation_lp_error,
    besov_norm,
    condition15_rhs,
    exceedance_measure,
    in_ball,
)
from .bounds import (
    BoundReport,
    in_neighborhood,
    lecam_additional_obs_bound,
    lemma2_tail_check,
    lemma3_neighborhood_bound,
    poisson_lower_tail,
    poisson_pair_bound,
    poisson_tail_check,
    poisson_tail_check_lower,
    poisson_tail_check_upper,
    poisson_upper_tail,
    superposition_chain_check,
    superposition_check,
)
from .counterexample import (
    CounterexampleConfig,
    RiskEstimate,
    asymptotic_limits,
    bayes_risk,
    conditional_bayes_risk,
    make_fbeta,
    occupancy_shortfall_prob,
    run_decision_problem,
    target_m,
)
from .densities import builtin_density, random_density
from .errors import (
    BudgetError,
    ConfigurationError,
    DomainError,
    EvaluationError,
    PoissonLabError,
    ResolutionMismatchError,
)
from .estimators import (
    EstimatorConfig,
    bin_resolution,
    raw_histogram,
    threshold_histogram,
    threshold_level,
    truncate_below,
)
from .experiments import (
    BinCounts,
    IidSample,
    PoissonSample,
    bin_counts,
    occupancy,
    occupancy_cdf_exact,
    occupancy_moments_exact,
    occupancy_pmf_exact,
    sample_iid,
    sample_poisson_process,
    superpose,
)
from .gridfn import (
    Density,
    GridFunction,
    average_operator,
    coarsen,
    common_grid,
    integrate_map,
    read_gridfn,
    refine,
    write_gridfn,
)
from .losses import (
    METRICS,
    evaluate_metric,
    hellinger_sq,
    hellinger_sq_poisson,
    l2_sq,
    ln_loss,
    sup_dist,
)
from .mc import McResult, RngSpec, map_streams, run_mc, stream_rng
