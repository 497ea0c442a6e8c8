import hashlib

import numpy as np
import pytest

from portopt.backtest import Window, run_backtest, summarize
from portopt.errors import DataError
from portopt.market_data import AlignedReturnPanel
from portopt.portfolio import RatioKind, Weights

from conftest import random_panel


def one_hot(tickers, k):
    values = np.zeros(len(tickers))
    values[k] = 1.0
    return Weights(tickers=tuple(tickers), values=values)


def make_report(objective, window, cumulative, dates=None):
    panel = random_panel(2, 3, seed=0)
    dates = dates or panel.dates[:2]
    curve = np.array([cumulative / 2.0, cumulative])
    from portopt.backtest import BacktestReport
    return BacktestReport(objective=objective, window=window,
                          cumulative_return=cumulative, dates=tuple(dates), curve=curve)


class TestRunBacktest:
    def test_one_hot_gain_then_loss(self):
        panel = AlignedReturnPanel(
            tickers=("A", "B"),
            dates=random_panel(2, 2, seed=0).dates,
            returns=np.array([[0.01, 0.5], [-0.01, 0.5]]),
        )
        report = run_backtest(panel, one_hot(panel.tickers, 0), "arithmetic")
        assert report.curve.tolist() == pytest.approx([0.01, 0.0], abs=1e-15)
        assert report.cumulative_return == pytest.approx(0.0, abs=1e-15)

    def test_symmetric_two_asset_cancellation(self):
        rng = np.random.default_rng(4)
        col = rng.normal(0, 0.02, size=30)
        panel = AlignedReturnPanel(
            tickers=("A", "B"),
            dates=random_panel(2, 30, seed=0).dates,
            returns=np.column_stack([col, -col]),
        )
        w = Weights(tickers=("A", "B"), values=np.array([0.5, 0.5]))
        report = run_backtest(panel, w, "arithmetic")
        assert report.cumulative_return == pytest.approx(0.0, abs=1e-15)

    def test_matches_double_sum_oracle(self):
        panel = random_panel(3, 50, seed=5)
        rng = np.random.default_rng(1)
        raw = rng.random(3)
        w = Weights(tickers=panel.tickers, values=raw / raw.sum())
        report = run_backtest(panel, w, "arithmetic")
        brute = sum(w.values[i] * panel.returns[t, i]
                    for t in range(panel.num_rows) for i in range(3))
        assert abs(report.cumulative_return - brute) < 1e-12

    def test_compounded_mode(self):
        panel = AlignedReturnPanel(
            tickers=("A", "B"),
            dates=random_panel(2, 2, seed=0).dates,
            returns=np.array([[0.01, 0.01], [0.02, 0.02]]),
        )
        w = Weights(tickers=("A", "B"), values=np.array([0.5, 0.5]))
        report = run_backtest(panel, w, "compounded")
        assert report.cumulative_return == pytest.approx(1.01 * 1.02 - 1.0, abs=1e-15)

    def test_curve_dates_are_window_dates(self):
        panel = random_panel(2, 25, seed=6)
        w = Weights(tickers=panel.tickers, values=np.array([0.5, 0.5]))
        report = run_backtest(panel, w)
        assert report.dates == panel.dates
        assert len(report.curve) == panel.num_rows

    def test_weights_not_mutated_by_backtest(self):
        panel = random_panel(2, 25, seed=7)
        w = Weights(tickers=panel.tickers, values=np.array([0.4, 0.6]))
        checksum = hashlib.sha256(w.values.tobytes()).hexdigest()
        run_backtest(panel, w, "arithmetic", RatioKind.SHARPE, Window.TEST)
        assert hashlib.sha256(w.values.tobytes()).hexdigest() == checksum

    def test_translation_consistency(self):
        # concatenated arithmetic curves, offset by the first window's final
        # value, equal the full-window curve
        panel = random_panel(2, 60, seed=8)
        w = Weights(tickers=panel.tickers, values=np.array([0.3, 0.7]))
        full = run_backtest(panel, w, "arithmetic")
        first = AlignedReturnPanel(tickers=panel.tickers, dates=panel.dates[:30],
                                   returns=panel.returns[:30])
        second = AlignedReturnPanel(tickers=panel.tickers, dates=panel.dates[30:],
                                    returns=panel.returns[30:])
        a = run_backtest(first, w, "arithmetic")
        b = run_backtest(second, w, "arithmetic")
        stitched = np.concatenate([a.curve, b.curve + a.curve[-1]])
        assert np.max(np.abs(stitched - full.curve)) < 1e-12


class TestSummarize:
    def test_training_winner_sharpe(self):
        # cumulative returns as reported for one sector's training window
        reports = [
            make_report(RatioKind.SHARPE, Window.TRAIN, 0.1518),
            make_report(RatioKind.SORTINO, Window.TRAIN, 0.0923),
            make_report(RatioKind.CALMAR, Window.TRAIN, 0.1341),
            make_report(RatioKind.SHARPE, Window.TEST, 0.2126),
            make_report(RatioKind.SORTINO, Window.TEST, 0.1009),
            make_report(RatioKind.CALMAR, Window.TEST, 0.0743),
        ]
        row = summarize(reports, {RatioKind.SHARPE: 0.8417, RatioKind.SORTINO: 0.1970,
                                  RatioKind.CALMAR: 0.1183}, universe="auto")
        assert row.best_train == RatioKind.SHARPE
        assert row.best_test == RatioKind.SHARPE
        assert row.max_sharpe == 0.8417

    def test_test_winner_calmar(self):
        reports = [
            make_report(RatioKind.SHARPE, Window.TRAIN, 0.1972),
            make_report(RatioKind.SORTINO, Window.TRAIN, 0.1890),
            make_report(RatioKind.CALMAR, Window.TRAIN, 0.1053),
            make_report(RatioKind.SHARPE, Window.TEST, 0.0698),
            make_report(RatioKind.SORTINO, Window.TEST, 0.0239),
            make_report(RatioKind.CALMAR, Window.TEST, 0.1063),
        ]
        row = summarize(reports, {}, universe="banking")
        assert row.best_train == RatioKind.SHARPE
        assert row.best_test == RatioKind.CALMAR

    def test_tie_breaks_to_first_objective(self):
        reports = [make_report(kind, window, 0.10)
                   for kind in RatioKind for window in Window]
        row = summarize(reports, {})
        assert row.best_train == RatioKind.SHARPE
        assert row.best_test == RatioKind.SHARPE

    def test_missing_report_rejected(self):
        reports = [make_report(RatioKind.SHARPE, Window.TRAIN, 0.1)]
        with pytest.raises(DataError, match="missing"):
            summarize(reports, {})

    def test_narrowed_objectives(self):
        reports = [
            make_report(RatioKind.SHARPE, Window.TRAIN, 0.1),
            make_report(RatioKind.SHARPE, Window.TEST, 0.2),
            make_report(RatioKind.CALMAR, Window.TRAIN, 0.3),
            make_report(RatioKind.CALMAR, Window.TEST, 0.1),
        ]
        row = summarize(reports, {RatioKind.SHARPE: 1.0},
                        objectives=(RatioKind.SHARPE, RatioKind.CALMAR))
        assert row.best_train == RatioKind.CALMAR
        assert row.best_test == RatioKind.SHARPE
        assert row.max_sortino is None

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force_argmax(self, seed):
        rng = np.random.default_rng(seed)
        values = {(kind, window): float(rng.normal(0.1, 0.2))
                  for kind in RatioKind for window in Window}
        reports = [make_report(kind, window, v) for (kind, window), v in values.items()]
        row = summarize(reports, {})
        for window, got in ((Window.TRAIN, row.best_train), (Window.TEST, row.best_test)):
            best_value = max(values[(k, window)] for k in RatioKind)
            assert values[(got, window)] == best_value