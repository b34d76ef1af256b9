"""Covariance-based estimation of linear regression and AR(p) models."""

from covreg.covariance import (
    CovarianceSummary,
    Dataset,
    coefficients_from_covariances,
    coefficients_p2,
    summarize,
)
from covreg.errors import (
    ColumnNotFound,
    CovregError,
    DimensionMismatch,
    InputFileNotFound,
    InvalidScenario,
    NonStationaryModel,
    ParseError,
    SingularMatrix,
    TooFewObservations,
    ZeroVariance,
)
from covreg.linalg import (
    SpectralDecomposition,
    invert_partitioned,
    pseudo_inverse_symmetric,
    solve_symmetric,
    symmetric_eigen,
)
from covreg.montecarlo import BiasReport, SimulationScenario, monte_carlo_bias
from covreg.regression import (
    RegressionFit,
    annihilator_checks,
    anova,
    dispersion_estimate,
    fit_ols,
    fit_unbiased,
    predict,
    residual_analysis,
)
from covreg.timeseries import (
    ArFit,
    ArModel,
    AutocovarianceSequence,
    autocovariances,
    fit_ar_ols,
    fit_ar_unbiased,
    fit_ar_yule_walker,
    lagged_design,
    load_lake_huron,
    simulate_ar,
)

__version__ = "0.1.0"
