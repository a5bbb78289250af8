"""Sparse sufficient dimension reduction via Cholesky matrix penalization.

The package estimates sparse bases of the central subspace for sliced
inverse regression (SIR), sliced average variance estimation (SAVE) and
principal Hessian directions (pHd), using an L1-penalized regression on the
Cholesky factor of the predictor covariance (CHOMP) together with its
adaptively weighted variant, a projection information criterion for tuning,
and reference competitors (Matrix Lasso, Lasso SIR).
"""

__version__ = "0.1.0"

from .exceptions import (
    AllDimensionsZero,
    AllZeroFits,
    ConfigError,
    DimensionMismatch,
    EmptySlice,
    FoldTooSmall,
    InputDataError,
    InvalidSliceCount,
    NonFiniteInput,
    NonPositiveEigenvalue,
    NotPositiveDefinite,
    PatternTooWide,
    RankDeficient,
    ReplicationInterrupt,
    SdrError,
    SliceTooSmall,
    ZeroReference,
    ZeroVarianceColumn,
)
from .linalg import EigenPairs, cholesky, projection, solve_lower, solve_upper, top_eigenpairs
from .kernels import (
    Dataset,
    KernelEstimate,
    PseudoResponse,
    assign_slices,
    kernel_phd,
    kernel_save,
    kernel_sir,
    prepare,
    pseudo_response,
    sample_covariance,
)
from .solvers import (
    ESTIMATORS,
    AdaptiveWeights,
    LassoProblem,
    SparseFit,
    SubspaceEstimate,
    adaptive_weights,
    chomp,
    fit_subspace,
    lasso_sir,
    matrix_lasso,
    solve_lasso,
    unpenalized,
)
from .tuning import TuningPolicy, cross_validate_lasso_sir, pic, select_pic
from .highdim import BandedCholeskyEstimate, banded_cholesky, chomp_highdim
from .metrics import EvalReport, distance_correlation, evaluate, projection_error, selection_rates
from .simgen import (
    CoefficientSpec,
    CovarianceSpec,
    EstimatorSpec,
    Scenario,
    SimulationResult,
    gen_coefficients,
    gen_covariance,
    gen_response,
    run_replications,
)
from .config import ScenarioConfig, load_scenario, scenario_from_dict
from .tables import ResultTable
