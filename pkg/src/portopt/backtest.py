"""Fixed-weight evaluation of chosen portfolios over train and test windows.

Weights come from the training optimization and are applied unchanged to
both windows; the default arithmetic curve is the running sum of the daily
weighted returns, with compounded growth available as an alternative.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError
from .market_data import AlignedReturnPanel, _frozen_array
from .metrics import CumulativeMode
from .portfolio import RatioKind, Weights, portfolio_daily_returns


class Window(str, Enum):
    TRAIN = "train"
    TEST = "test"


@dataclass(frozen=True)
class BacktestReport:
    """Cumulative-return curve of one objective's portfolio on one window."""

    objective: RatioKind
    window: Window
    cumulative_return: float
    dates: tuple[dt.date, ...]
    curve: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "curve", _frozen_array(self.curve))
        if len(self.curve) != len(self.dates):
            raise ValueError("curve and dates must have equal length")
        if len(self.curve) == 0:
            raise ValueError("empty backtest curve")
        if abs(float(self.curve[-1]) - self.cumulative_return) > 1e-12:
            raise ValueError("curve does not end at the reported cumulative return")

    @property
    def points(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.dates, (float(v) for v in self.curve)))


@dataclass(frozen=True)
class SummaryRow:
    """One universe's line of the cross-objective comparison table."""

    universe: str
    best_train: RatioKind | None
    best_test: RatioKind | None
    max_sharpe: float | None
    max_sortino: float | None
    max_calmar: float | None


def run_backtest(
    panel: AlignedReturnPanel,
    weights: Weights,
    mode: CumulativeMode = "arithmetic",
    objective: RatioKind = RatioKind.SHARPE,
    window: Window = Window.TRAIN,
) -> BacktestReport:
    """Apply fixed weights to a window's panel and accumulate the returns."""
    if panel.num_rows == 0:
        raise DataError(f"empty {window.value} window")
    stream = portfolio_daily_returns(panel, weights)
    if mode == "arithmetic":
        curve = np.cumsum(stream)
    elif mode == "compounded":
        curve = np.cumprod(1.0 + stream) - 1.0
    else:
        raise ValueError(f"unknown cumulative mode {mode!r}")
    return BacktestReport(
        objective=objective,
        window=window,
        cumulative_return=float(curve[-1]),
        dates=panel.dates,
        curve=curve,
    )


def summarize(
    reports: Iterable[BacktestReport],
    training_ratios: Mapping[RatioKind, float | None],
    universe: str = "",
    objectives: Sequence[RatioKind] = tuple(RatioKind),
) -> SummaryRow:
    """Pick the best objective per window by cumulative return.

    Requires a train and a test report for every objective in
    ``objectives``; ties break toward the earlier objective in enum order.
    ``objectives`` may be narrowed when some never produced a valid
    selection (e.g. no-downside universes).
    """
    by_key = {(r.objective, r.window): r for r in reports}
    for kind in objectives:
        for window in Window:
            if (kind, window) not in by_key:
                raise DataError(f"missing {window.value} report for objective {kind.value}")
    best: dict[Window, RatioKind | None] = {}
    for window in Window:
        winner = None
        winner_value = None
        for kind in RatioKind:  # enum order fixes the tie-break
            if kind not in objectives:
                continue
            value = by_key[(kind, window)].cumulative_return
            if winner_value is None or value > winner_value:
                winner, winner_value = kind, value
        best[window] = winner
    return SummaryRow(
        universe=universe,
        best_train=best[Window.TRAIN],
        best_test=best[Window.TEST],
        max_sharpe=training_ratios.get(RatioKind.SHARPE),
        max_sortino=training_ratios.get(RatioKind.SORTINO),
        max_calmar=training_ratios.get(RatioKind.CALMAR),
    )
