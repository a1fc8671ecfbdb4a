"""Online conformal interval calibration: algorithms, guarantees, benchmarks."""

from .bounds import (
    BoundVerdict,
    GrowthEnvelope,
    bernoulli_kl,
    check_bound,
    fit_growth_envelope,
    kl_lower_bound_rhs,
    kt_coverage_bound,
    osd_coverage_bound,
    up_coverage_bound,
    up_regret_envelope,
)
from .generators import (
    Ar3Result,
    CsvFormatError,
    IidConfig,
    QuadraticMixConfig,
    SinusoidConfig,
    StationaryConfig,
    ar3_scores,
    gen_iid,
    gen_quadratic_mix,
    gen_sinusoid,
    gen_stationary,
    iid_oracle_quantile,
    ingest_csv,
)
from .metrics import (
    MetricsReport,
    ParetoPoint,
    TrackingPoint,
    compute_metrics,
    pareto_frontier,
    rolling_local,
    target_tracking,
    width_convergence_check,
)
from .pinball import (
    RoundOutcome,
    Trace,
    linearized_regret,
    make_outcome,
    miscoverage,
    pinball_loss,
    pinball_regret,
    subgradient,
    validate_alpha,
)
from .portfolio import (
    UniversalPortfolioMixture,
    best_crp_log_wealth,
    lambda_to_beta,
    market_returns,
    up_weight_integral,
    wealth_replay,
)
from .predictors import (
    AlphaCorrected,
    CalibrationProtocolError,
    DtAci,
    KtBettor,
    PidControl,
    Predictor,
    PREDICTOR_NAMES,
    ScaleFreeGradient,
    SubgradientDescent,
    TrivialPredictor,
    UniversalPortfolio,
    alpha_corrected,
    make_predictor,
    run_predictor,
)

__version__ = "0.1.0"
