"""Portfolio-level aggregation: weighted returns, the annualized quadratic
risk form, and the three risk-adjusted ratios.

A ratio that cannot be formed (zero or undefined denominator) is ``None``,
never an infinity or NaN, so it can never leak into an argmax as a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InsufficientDownsideData
from .market_data import AlignedReturnPanel, _frozen_array
from .metrics import AssetStats, CovarianceMatrix, downside_deviation, max_drawdown, wealth_curve

RATIO_EPS = 1e-12


class RatioKind(str, Enum):
    """The three selection objectives, in tie-break order."""

    SHARPE = "sharpe"
    SORTINO = "sortino"
    CALMAR = "calmar"


# Risk measure each objective ranks candidates by (and plots on its x-axis).
RISK_AXIS = {
    RatioKind.SHARPE: "annual_volatility",
    RatioKind.SORTINO: "downside_deviation",
    RatioKind.CALMAR: "max_drawdown",
}


@dataclass(frozen=True)
class RatioObjective:
    kind: RatioKind
    risk_free_rate: float = 0.0

    def __post_init__(self):
        if self.risk_free_rate < 0.0:
            raise ValueError(f"risk-free rate must be >= 0, got {self.risk_free_rate}")


@dataclass(frozen=True)
class Weights:
    """Long-only allocation over an ordered universe, summing to one."""

    tickers: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.ndim != 1 or len(self.values) != len(self.tickers):
            raise ValueError(f"{len(self.values)} weights for {len(self.tickers)} tickers")
        if np.any(self.values < 0.0):
            raise ValueError("weights must be nonnegative")
        total = float(self.values.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1")

    def as_mapping(self) -> dict[str, float]:
        return {t: float(w) for t, w in zip(self.tickers, self.values)}


@dataclass(frozen=True)
class PortfolioMetrics:
    """Risk/return summary of one candidate portfolio.

    ``downside_deviation`` is annualized (daily value scaled by sqrt(A)) and
    is ``None`` when the stream has fewer than two negative returns.
    """

    annual_return: float
    annual_volatility: float
    downside_deviation: float | None
    max_drawdown: float
    sharpe: float | None
    sortino: float | None
    calmar: float | None

    def ratio(self, kind: RatioKind) -> float | None:
        return {RatioKind.SHARPE: self.sharpe, RatioKind.SORTINO: self.sortino,
                RatioKind.CALMAR: self.calmar}[kind]

    def risk(self, kind: RatioKind) -> float | None:
        """Risk coordinate of this candidate on the given objective's axis."""
        return {RatioKind.SHARPE: self.annual_volatility,
                RatioKind.SORTINO: self.downside_deviation,
                RatioKind.CALMAR: self.max_drawdown}[kind]


def _check_tickers(expected: tuple[str, ...], got: tuple[str, ...], what: str):
    if expected != got:
        raise ValueError(f"{what} tickers {got} do not match panel tickers {expected}")


def portfolio_daily_returns(panel: AlignedReturnPanel, weights: Weights) -> np.ndarray:
    """Weighted sum of the panel's daily returns, one value per panel date."""
    _check_tickers(panel.tickers, weights.tickers, "weights")
    return panel.returns @ weights.values


def portfolio_annual_return(stats: Sequence[AssetStats], weights: Weights) -> float:
    """R = sum_i w_i * R_i over the assets' annualized returns."""
    _check_tickers(weights.tickers, tuple(s.ticker for s in stats), "stats")
    return float(np.dot(weights.values, [s.annual_return for s in stats]))


def portfolio_variance(cov: CovarianceMatrix, weights: Weights, annualization: float) -> float:
    """Annualized portfolio variance V = A * w' S w over the daily covariance."""
    _check_tickers(weights.tickers, cov.tickers, "covariance")
    v = float(annualization * (weights.values @ cov.values @ weights.values))
    if v < -1e-12:
        raise ValueError(f"negative portfolio variance {v}: covariance input is broken")
    return max(v, 0.0)


def sharpe(annual_return: float, annual_volatility: float, objective: RatioObjective) -> float | None:
    """Excess annual return per unit of annual volatility; None when volatility is ~0."""
    if annual_volatility < RATIO_EPS:
        return None
    return (annual_return - objective.risk_free_rate) / annual_volatility


def sortino(annual_return: float, downside_deviation_annualized: float | None,
            objective: RatioObjective) -> float | None:
    """Excess annual return per unit of annualized downside deviation."""
    dd = downside_deviation_annualized
    if dd is None or dd < RATIO_EPS:
        return None
    return (annual_return - objective.risk_free_rate) / dd


def calmar(annual_return: float, max_drawdown: float, objective: RatioObjective) -> float | None:
    """Annual return over maximum drawdown. The raw return is used: no
    risk-free subtraction in this ratio's definition."""
    if max_drawdown < RATIO_EPS:
        return None
    return annual_return / max_drawdown


def evaluate(
    panel: AlignedReturnPanel,
    weights: Weights,
    cov: CovarianceMatrix,
    stats: Sequence[AssetStats],
    annualization: float,
    risk_free_rate: float = 0.0,
) -> PortfolioMetrics:
    """Score one weight vector: compute the portfolio daily stream once, then
    every metric and all three ratios (finite or None) from it and from the
    analytic return/variance forms."""
    stream = portfolio_daily_returns(panel, weights)
    annual_return = portfolio_annual_return(stats, weights)
    annual_volatility = math.sqrt(portfolio_variance(cov, weights, annualization))
    try:
        dd_annual = downside_deviation(stream) * math.sqrt(annualization)
    except InsufficientDownsideData:
        dd_annual = None
    mdd = max_drawdown(wealth_curve(stream)).max_drawdown
    return PortfolioMetrics(
        annual_return=annual_return,
        annual_volatility=annual_volatility,
        downside_deviation=dd_annual,
        max_drawdown=mdd,
        sharpe=sharpe(annual_return, annual_volatility, RatioObjective(RatioKind.SHARPE, risk_free_rate)),
        sortino=sortino(annual_return, dd_annual, RatioObjective(RatioKind.SORTINO, risk_free_rate)),
        calmar=calmar(annual_return, mdd, RatioObjective(RatioKind.CALMAR, risk_free_rate)),
    )
