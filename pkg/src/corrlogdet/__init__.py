"""Log-determinant statistics of large sample correlation matrices.

Core surfaces: heavy-tailed entry sampling (:mod:`corrlogdet.sampling`),
matrix construction and Cholesky log-det (:mod:`corrlogdet.matrices`),
the sequential projection recursion (:mod:`corrlogdet.girko`), exact
exchangeable-moment identities (:mod:`corrlogdet.moments`), scaled-moment
limits (:mod:`corrlogdet.tail_limits`), limit-law standardization and
goodness of fit (:mod:`corrlogdet.cltstats`), and a config-driven Monte
Carlo harness (:mod:`corrlogdet.simulate`) with CLI (``corrlogdet``).
"""

from .cltstats import (
    LawConstants,
    ks_test,
    law_constants,
    standardize_corr,
    standardize_cov,
    stirling_gap,
    summary_moments,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    IncompleteTableError,
    InconsistentTableError,
    NotPositiveDefiniteError,
    NumericalFailure,
    ParameterDomainError,
    ResourceError,
    SingularStepError,
    VerificationFailure,
)
from .girko import GirkoTrace, ProjectionState, diag_power_sums, girko_log_det, split_uv
from .matrices import (
    CorrelationMatrix,
    DataMatrix,
    SelfNormalizedMatrix,
    log_det_spd,
    sample_correlation,
    sample_covariance,
    self_normalize,
)
from .moments import (
    MomentTable,
    WeightVector,
    complete_table,
    fourth_moment_centered,
    fourth_moment_raw,
    fourth_moment_sphere,
    k_coefficients,
    mc_moment_table,
    permutation_oracle,
    quadratic_form_moments,
    sphere_identity_residuals,
    uniform_sphere_table,
)
from .sampling import RngStream, TailLaw, fill_matrix, sample_entries, sample_entry
from .simulate import ExperimentConfig, ExperimentReport, run_simulation, statistics_csv
from .tail_limits import (
    MomentLimitQuery,
    convergence_diagnostic,
    moment_limit,
    moment_limit_single,
    standardized_tail_constant,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationMatrix",
    "ConfigError",
    "DataMatrix",
    "DegenerateInputError",
    "ExperimentConfig",
    "ExperimentReport",
    "GirkoTrace",
    "IncompleteTableError",
    "InconsistentTableError",
    "LawConstants",
    "MomentLimitQuery",
    "MomentTable",
    "NotPositiveDefiniteError",
    "NumericalFailure",
    "ParameterDomainError",
    "ProjectionState",
    "ResourceError",
    "RngStream",
    "SelfNormalizedMatrix",
    "SingularStepError",
    "TailLaw",
    "VerificationFailure",
    "WeightVector",
    "complete_table",
    "convergence_diagnostic",
    "diag_power_sums",
    "fill_matrix",
    "fourth_moment_centered",
    "fourth_moment_raw",
    "fourth_moment_sphere",
    "girko_log_det",
    "k_coefficients",
    "ks_test",
    "law_constants",
    "log_det_spd",
    "mc_moment_table",
    "moment_limit",
    "moment_limit_single",
    "permutation_oracle",
    "quadratic_form_moments",
    "run_simulation",
    "sample_correlation",
    "sample_covariance",
    "sample_entries",
    "sample_entry",
    "self_normalize",
    "sphere_identity_residuals",
    "split_uv",
    "standardize_corr",
    "standardize_cov",
    "standardized_tail_constant",
    "statistics_csv",
    "stirling_gap",
    "summary_moments",
    "uniform_sphere_table",
]
