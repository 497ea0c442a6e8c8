"""Monte Carlo mean-variance portfolio construction over the weight simplex,
with max-Sharpe / max-Sortino / max-Calmar selection and train/test
cumulative-return backtesting."""

from .backtest import BacktestReport, SummaryRow, Window, run_backtest, summarize
from .errors import DataError, InsufficientDownsideData, NoValidCandidateError, PortfolioError
from .market_data import (
    AlignedReturnPanel,
    AssetEntry,
    PriceSeries,
    SplitSpec,
    UniverseSpec,
    align,
    compute_daily_returns,
    filter_full_history,
    load_manifest,
    load_prices,
    split,
)
from .metrics import (
    TRADING_DAYS_PER_YEAR,
    AssetStats,
    CovarianceMatrix,
    DrawdownStats,
    asset_stats,
    covariance,
    cumulative_return,
    downside_deviation,
    max_drawdown,
    wealth_curve,
)
from .optimizer import (
    Candidate,
    OptimizationResult,
    SearchConfig,
    candidate_rng,
    frontier,
    generate,
    sample_weights,
    select_max,
    select_min_risk,
)
from .portfolio import (
    PortfolioMetrics,
    RatioKind,
    RatioObjective,
    Weights,
    calmar,
    evaluate,
    portfolio_annual_return,
    portfolio_daily_returns,
    portfolio_variance,
    sharpe,
    sortino,
)

__version__ = "0.1.0"
