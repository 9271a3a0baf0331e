"""Parameter estimation for stationary time series by matching empirical and
simulated characteristic functions."""

from chfmatch._core import (  # noqa: F401
    BlockKind,
    BlockMoments,
    BlockSet,
    CvDiagnostics,
    EmpiricalCovariance,
    EstimationResult,
    EstimatorKind,
    Innovation,
    MeanOverflowError,
    ModelFamily,
    ModelKind,
    NonPDError,
    ObjectiveConfig,
    ParameterVector,
    SeedPlan,
    WeightFamily,
    WeightSpec,
    ar1_covariance,
    arfima_covariance,
    chf_error_diagnostic,
    control_values,
    cv_chf,
    empirical_chf,
    empirical_covariance,
    estimate,
    index_of_dispersion,
    make_blocks,
    mc_chf,
    poisson_ar_moments,
    q_cv,
    q_nh,
    q_oracle_gaussian,
    simulate_path,
    weight_fourier,
    weight_sample,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
