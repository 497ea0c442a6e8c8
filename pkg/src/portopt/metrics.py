"""Return-stream statistics: annualization, covariance, downside deviation,
wealth curves, drawdowns and cumulative returns.

All estimators use sample (n-1) denominators. The annualization factor is a
plain argument everywhere so tests can run on tiny synthetic calendars.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DataError, InsufficientDownsideData
from .market_data import AlignedReturnPanel, _frozen_array

TRADING_DAYS_PER_YEAR = 252.0

CumulativeMode = Literal["arithmetic", "compounded"]


@dataclass(frozen=True)
class AssetStats:
    """Per-asset daily and annualized return/volatility figures."""

    ticker: str
    mean_daily_return: float
    daily_volatility: float
    annual_return: float
    annual_volatility: float


@dataclass(frozen=True)
class CovarianceMatrix:
    """Sample covariance of daily returns over an aligned calendar."""

    tickers: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        n = len(self.tickers)
        if self.values.shape != (n, n):
            raise ValueError(f"covariance shape {self.values.shape} does not match {n} tickers")
        if np.max(np.abs(self.values - self.values.T), initial=0.0) > 1e-12:
            raise ValueError("covariance matrix is not symmetric")
        if np.any(np.diag(self.values) < 0.0):
            raise ValueError("covariance matrix has a negative diagonal entry")


@dataclass(frozen=True)
class DrawdownStats:
    """Largest peak-to-trough decline of a wealth curve.

    Indices address the wealth curve; dates are carried through when the
    caller supplies them.
    """

    max_drawdown: float
    peak_index: int
    trough_index: int
    peak_date: dt.date | None = None
    trough_date: dt.date | None = None

    def __post_init__(self):
        if not 0.0 <= self.max_drawdown < 1.0:
            raise ValueError(f"max_drawdown {self.max_drawdown} outside [0, 1)")
        if self.peak_index > self.trough_index:
            raise ValueError("peak must not come after trough")


def asset_stats(returns, annualization: float, ticker: str = "") -> AssetStats:
    """Mean/volatility of a daily return stream, annualized by ``annualization``.

    Annual return scales by the factor, volatility by its square root.
    """
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        raise DataError(f"{ticker or 'series'}: need at least 2 returns for statistics")
    mean = float(r.mean())
    vol = float(r.std(ddof=1))
    return AssetStats(
        ticker=ticker,
        mean_daily_return=mean,
        daily_volatility=vol,
        annual_return=mean * annualization,
        annual_volatility=vol * math.sqrt(annualization),
    )


def covariance(panel: AlignedReturnPanel) -> CovarianceMatrix:
    """Sample covariance matrix of the panel's daily returns."""
    if panel.num_rows < 2:
        raise DataError("need at least 2 return rows for a covariance matrix")
    values = np.cov(panel.returns, rowvar=False, ddof=1)
    return CovarianceMatrix(tickers=panel.tickers, values=values)


def downside_deviation(returns) -> float:
    """Sample standard deviation of the strictly negative returns.

    Raises :class:`InsufficientDownsideData` when fewer than two negative
    returns exist; callers treat that stream as invalid for Sortino scoring.
    """
    r = np.asarray(returns, dtype=float)
    if r.size == 0:
        raise DataError("empty return stream")
    neg = r[r < 0.0]
    if neg.size < 2:
        raise InsufficientDownsideData(
            f"insufficient downside observations: {neg.size} negative return(s)"
        )
    return float(neg.std(ddof=1))


def wealth_curve(returns) -> np.ndarray:
    """Compounded wealth path starting at 1.0; length = len(returns) + 1."""
    r = np.asarray(returns, dtype=float)
    if r.size == 0:
        raise DataError("empty return stream")
    if np.any(r <= -1.0):
        raise DataError("return of -100% or worse: wealth curve would be non-positive")
    return np.concatenate(([1.0], np.cumprod(1.0 + r)))


def max_drawdown(wealth, dates: Sequence[dt.date] | None = None) -> DrawdownStats:
    """Running-peak maximum drawdown of a positive wealth curve.

    A single forward pass keeps the running peak; the drawdown at each step
    is (peak - w) / peak and the result is its maximum, recorded at the first
    step that attains it. Monotone curves give 0 at index 0.
    """
    w = np.asarray(wealth, dtype=float)
    if w.size == 0:
        raise DataError("empty wealth curve")
    if np.any(w <= 0.0):
        raise DataError("wealth curve must be strictly positive")
    if dates is not None and len(dates) != w.size:
        raise ValueError(f"{len(dates)} dates for a wealth curve of length {w.size}")
    peaks = np.maximum.accumulate(w)
    drawdowns = (peaks - w) / peaks
    trough = int(np.argmax(drawdowns))
    peak = int(np.argmax(w[: trough + 1] == peaks[trough]))
    return DrawdownStats(
        max_drawdown=float(drawdowns[trough]),
        peak_index=peak,
        trough_index=trough,
        peak_date=dates[peak] if dates is not None else None,
        trough_date=dates[trough] if dates is not None else None,
    )


def cumulative_return(returns, mode: CumulativeMode = "arithmetic") -> float:
    """Window-level return: plain sum of daily returns, or compounded growth."""
    r = np.asarray(returns, dtype=float)
    if r.size == 0:
        raise DataError("empty return stream")
    if mode == "arithmetic":
        return float(np.sum(r))
    if mode == "compounded":
        return float(np.prod(1.0 + r) - 1.0)
    raise ValueError(f"unknown cumulative mode {mode!r}")
