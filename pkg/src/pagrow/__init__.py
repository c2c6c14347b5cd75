"""pagrow: simulator and exact analytics for k-neighbour preferential
attachment.

Grow multigraphs at scale, evaluate the closed-form degree distribution and
moments exactly over rationals, and verify each against independent oracles
and Monte Carlo experiments.
"""

from .analytics import (
    ComparisonReport,
    SampleSet,
    check_pa_class,
    collect_step_increments,
    compare_degree_distribution,
    compare_degree_sequence,
    compare_mean_degree,
    compare_models_tv,
    merge_sample_sets,
    reports_to_json,
    reports_to_text,
    run_replicas,
    tv_distance,
)
from .errors import (
    CancellationWarning,
    DomainError,
    EmptyGraph,
    InsufficientDegree,
    InsufficientSamples,
    MismatchedSupport,
    NonIntegralParameters,
    PagrowError,
    ParameterOutOfRange,
    StateSpaceTooLarge,
    UnknownVertex,
    ZeroDenominator,
)
from .graph import MultiGraph, degree_histogram, sample_neighbour_slots, sample_preferential
from .growth import (
    GrowthConfig,
    GrowthResult,
    SeedGraph,
    enumerate_process_distribution,
    grow_kneighbour,
    grow_lcd,
    write_degree_trace,
)
from .numerics import (
    EXACT,
    FLOAT,
    EvalMode,
    Rational,
    binomial,
    falling_factorial,
    falling_factorial_ratio,
    log_gamma,
)
from .pmf import DegreePmf
from .rng import RngStream
from .tolerances import TOL, TOLERANCE_VERSION, Tolerances
from .urn import (
    TriangularUrnSpec,
    alpha_degree_seq,
    degree_pmf_from_seed,
    expected_degree,
    expected_degree_asymptotic,
    expected_degree_gamma,
    expected_degree_second_moment,
    urn_gf_oracle,
    urn_mean,
    urn_pmf,
    urn_pmf_dp_oracle,
    urn_second_moment,
)

__version__ = "0.1.0"
