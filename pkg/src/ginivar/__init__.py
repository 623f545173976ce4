"""Variance-constancy testing for short-range dependent time series.

The test splits a series into blocks, takes Gini's mean difference of the
log block variances, standardizes it with a subsampling long-run variance
estimate, and compares against the normal limit; rejections can be
followed up with recursive change-point localization.  A Monte Carlo
harness measures empirical size, power and estimator quality for the
bundled data-generating processes.
"""

from .changepoint import (
    ChangePoint,
    ChangePointSet,
    dominant_block_pair,
    locate_all,
    refine_within_window,
)
from .dgp import (
    Ar1,
    Arma22,
    CenteredExponential,
    ConstantVariance,
    Garch11,
    IidNormal,
    LinearMean,
    PiecewiseLinearMean,
    PiecewiseVariance,
    ScenarioSpec,
    SineMean,
    SineVariance,
    StepMean,
    ZeroMean,
    generate_noise,
    generate_sample,
    make_alternative,
)
from .errors import (
    ConstantSeriesError,
    DegenerateBlockError,
    EstimationError,
    GinivarError,
    NoiseSpecError,
    SampleTooShortError,
)
from .lrv import LrvEstimate, center_by_block_means, estimate_kappa
from .montecarlo import (
    STANDARD_NOISES,
    ExperimentReport,
    ExperimentSpec,
    run_experiment,
    run_lrv_quality,
    run_power,
    run_size,
)
from .series import (
    BlockPartition,
    TimeSeries,
    difference,
    drop_indices,
    make_partition,
    seasonal_difference,
)
from .vartest import (
    CONSTANTS,
    GINI_LIMIT_SD,
    GINI_LIMIT_VAR,
    MEAN_ABS_NORMAL_DIFF,
    BlockStats,
    TestResult,
    gini_mean_difference,
    limit_functional,
    local_variances,
    run_test,
    u_statistic,
)
from .version import __version__

__all__ = [
    "__version__",
    # series
    "TimeSeries",
    "BlockPartition",
    "make_partition",
    "difference",
    "seasonal_difference",
    "drop_indices",
    # test core
    "MEAN_ABS_NORMAL_DIFF",
    "GINI_LIMIT_VAR",
    "GINI_LIMIT_SD",
    "CONSTANTS",
    "BlockStats",
    "TestResult",
    "local_variances",
    "gini_mean_difference",
    "u_statistic",
    "limit_functional",
    "run_test",
    # long-run variance
    "LrvEstimate",
    "center_by_block_means",
    "estimate_kappa",
    # change points
    "ChangePoint",
    "ChangePointSet",
    "dominant_block_pair",
    "refine_within_window",
    "locate_all",
    # data generation
    "IidNormal",
    "CenteredExponential",
    "Ar1",
    "Arma22",
    "Garch11",
    "ZeroMean",
    "LinearMean",
    "SineMean",
    "StepMean",
    "PiecewiseLinearMean",
    "ConstantVariance",
    "PiecewiseVariance",
    "SineVariance",
    "ScenarioSpec",
    "generate_noise",
    "generate_sample",
    "make_alternative",
    # Monte Carlo
    "STANDARD_NOISES",
    "ExperimentSpec",
    "ExperimentReport",
    "run_size",
    "run_power",
    "run_lrv_quality",
    "run_experiment",
    # errors
    "GinivarError",
    "EstimationError",
    "SampleTooShortError",
    "DegenerateBlockError",
    "ConstantSeriesError",
    "NoiseSpecError",
]
