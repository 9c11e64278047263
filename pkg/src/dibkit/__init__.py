"""Dynamic information borrowing: estimators, limit laws, risk and testing tools."""

from .asymptotics import (
    EXTERNAL_MLE,
    LimitDraw,
    LocalScenario,
    NormalLaw,
    limit_draw,
    limit_law_theorem4,
    limit_sample,
    limit_srmse,
    limit_value,
)
from .estimators import (
    AdaptiveLasso,
    AdaptiveMmse,
    EmpiricalBayesPowerPrior,
    EstimateResult,
    EstimatorConfig,
    FixedPowerPrior,
    GeneralizedBorrow,
    HellingerPowerPrior,
    LimitedTranslation,
    Mle,
    NormalPriorBayes,
    OracleMmse,
    Pooled,
    SensitivityMmse,
    StudentTPriorBayes,
    TestThenPool,
    config_from_id,
    est_alasso,
    est_ammse,
    est_ammse_s,
    est_ebpp,
    est_gdib,
    est_hdpp,
    est_lstp,
    est_ltr,
    est_mle,
    est_np,
    est_ommse,
    est_pooled,
    est_ttpool,
    estimate,
    estimator_id,
    gamma_eb,
    gamma_hd,
    power_prior_mean,
)
from .montecarlo import (
    BootstrapInterval,
    EmpiricalDist,
    SimPlan,
    bootstrap_ci,
    ks_distance,
    simulate,
)
from .risk import (
    ConflictPrior,
    LaplacePrior,
    NormalPrior,
    PointMassPrior,
    RiskCurve,
    StudentTPrior,
    UniformPrior,
    imse,
    integrated_srmse,
    mse_numeric,
    srmse,
    srmse_curve,
    table_priors,
)
from .summaries import (
    BinomialRaw,
    StandardizedSummary,
    TwoSampleSummary,
    conflict_stats,
    from_raw_binomial,
    standardized_two_sample,
)
from .testing import (
    AllDelta,
    Convention,
    CriticalValue,
    DeltaBounded,
    DeltaZero,
    PowerCurve,
    SweetSpot,
    TestSpec,
    alasso_local_power_decay,
    critical_value,
    p2_p3,
    power,
    power_curve,
    pvalue,
    sweet_spot,
    tipping_point,
)

__version__ = "0.1.0"
