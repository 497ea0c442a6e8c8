"""End-to-end orchestration: manifest -> panels -> search -> backtests ->
artifact tree.

Each command tracks the files it writes and removes them all if anything
fails, so an output directory never holds a partial run. Artifact layout,
for output directory OUT and universe NAME:

    OUT/NAME/weights.csv             asset x objective weight table (4 dp)
    OUT/NAME/frontier_<obj>.csv      candidate cloud on that objective's risk axis
    OUT/NAME/optimization.json       selections + full-precision weights
    OUT/NAME/curve_<obj>_<win>.csv   cumulative-return curves
    OUT/NAME/frontier_<obj>.svg      scatter plot (blue = min risk, red = max ratio)
    OUT/summary.csv                  one row per universe (4 dp)
    OUT/summary.json                 full-precision summary
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backtest import BacktestReport, SummaryRow, Window, run_backtest, summarize
from .errors import DataError
from .market_data import (
    AlignedReturnPanel,
    SplitSpec,
    UniverseSpec,
    align,
    filter_full_history,
    load_manifest,
    load_prices,
    split,
)
from .metrics import CumulativeMode, asset_stats, covariance
from .optimizer import OptimizationResult, SearchConfig, generate
from .portfolio import RatioKind, Weights
from . import report
from .report import ArtifactTracker, ScatterPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    manifest_path: Path
    split: SplitSpec
    search: SearchConfig
    out_dir: Path
    cum_mode: CumulativeMode = "arithmetic"
    workers: int = 1


@dataclass
class Outcome:
    """What a command produced: summary rows (backtest/run only), the files
    written, and human-readable warnings (exclusions, skipped objectives)."""

    summaries: list[SummaryRow] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class UniverseRun:
    spec: UniverseSpec
    excluded: list[str]
    train: AlignedReturnPanel
    test: AlignedReturnPanel
    result: OptimizationResult

    @property
    def name(self) -> str:
        return self.spec.name

    def weights_for(self, kind: RatioKind) -> Weights | None:
        idx = self.result.best.get(kind)
        return None if idx is None else self.result.candidates[idx].weights

    def available_objectives(self) -> tuple[RatioKind, ...]:
        return tuple(k for k in RatioKind if self.result.best.get(k) is not None)

    def training_ratios(self) -> dict[RatioKind, float | None]:
        return {k: self.result.best_ratio_value(k) for k in RatioKind}


def _prepare_panels(universe: UniverseSpec, split_spec: SplitSpec, warnings: list[str]):
    series = [load_prices(a.csv_path, a.ticker) for a in universe.assets]
    kept, excluded = filter_full_history(series, split_spec.train_start)
    for ticker in excluded:
        warnings.append(f"universe '{universe.name}': excluded {ticker} "
                        f"(history starts after {split_spec.train_start})")
    if len(kept) < 2:
        raise DataError(f"universe '{universe.name}' too small: "
                        f"{len(kept)} asset(s) with full history")
    panel = align(kept)
    train, test = split(panel, split_spec)
    return train, test, excluded


def _optimize_universe(universe: UniverseSpec, config: RunConfig, warnings: list[str]) -> UniverseRun:
    train, test, excluded = _prepare_panels(universe, config.split, warnings)
    stats = [asset_stats(train.returns[:, i], config.search.annualization, ticker=t)
             for i, t in enumerate(train.tickers)]
    cov = covariance(train)
    result = generate(train, stats, cov, config.search, workers=max(1, config.workers))
    run = UniverseRun(spec=universe, excluded=excluded, train=train, test=test, result=result)
    for kind in RatioKind:
        if result.best.get(kind) is None:
            warnings.append(f"universe '{universe.name}': no candidate with a valid "
                            f"{kind.value} ratio; objective skipped")
    return run


def _emit_optimize_artifacts(run: UniverseRun, config: RunConfig, tracker: ArtifactTracker):
    udir = config.out_dir / run.name
    weights = {kind: run.weights_for(kind) for kind in RatioKind}
    report.write_weights_table(udir / "weights.csv", run.train.tickers, weights, tracker)
    for kind in RatioKind:
        report.write_frontier_data(udir / f"frontier_{kind.value}.csv", run.result, kind, tracker)
    doc = report.optimization_document(run.name, run.train.tickers, run.excluded,
                                       run.result, config.search)
    report.write_json(udir / "optimization.json", doc, tracker)


def _backtest_reports(run: UniverseRun, cum_mode: CumulativeMode) -> list[BacktestReport]:
    reports = []
    for kind in run.available_objectives():
        weights = run.weights_for(kind)
        for window, panel in ((Window.TRAIN, run.train), (Window.TEST, run.test)):
            reports.append(run_backtest(panel, weights, cum_mode, kind, window))
    return reports


def _summary_for(run: UniverseRun, reports: list[BacktestReport]) -> SummaryRow:
    available = run.available_objectives()
    if not available:
        return SummaryRow(universe=run.name, best_train=None, best_test=None,
                          max_sharpe=None, max_sortino=None, max_calmar=None)
    return summarize(reports, run.training_ratios(), universe=run.name, objectives=available)


def _emit_backtest_artifacts(run: UniverseRun, reports: list[BacktestReport],
                             config: RunConfig, tracker: ArtifactTracker):
    udir = config.out_dir / run.name
    by_key = {(r.objective, r.window): r for r in reports}
    for kind in RatioKind:
        for window in Window:
            rep = by_key.get((kind, window))
            if rep is not None:
                report.write_curve(udir / f"curve_{kind.value}_{window.value}.csv", rep, tracker)


def _emit_summary(rows: list[SummaryRow], cums: dict, config: RunConfig, tracker: ArtifactTracker):
    report.write_summary_csv(config.out_dir / "summary.csv", rows, tracker)
    report.write_json(config.out_dir / "summary.json",
                      report.summary_document(rows, cums), tracker)


def _emit_svgs(run_name: str, result_points, config: RunConfig,
               tracker: ArtifactTracker, warnings: list[str]):
    udir = config.out_dir / run_name
    for kind in RatioKind:
        points = result_points(kind)
        if not points:
            warnings.append(f"universe '{run_name}': no candidates on the "
                            f"{kind.value} risk axis; plot skipped")
            continue
        report.write_frontier_svg(udir / f"frontier_{kind.value}.svg",
                                  f"{run_name}: {kind.value} candidates",
                                  kind, points, tracker)


def _cumulative_map(reports: list[BacktestReport]) -> dict:
    out: dict = {}
    for rep in reports:
        out.setdefault(rep.objective, {})[rep.window] = rep.cumulative_return
    return out


def _scatter_points(result: OptimizationResult, kind: RatioKind) -> list[ScatterPoint]:
    best = result.best.get(kind)
    min_risk = result.min_risk.get(kind)
    points = []
    for c in result.candidates:
        risk = c.metrics.risk(kind)
        if risk is None:
            continue
        points.append(ScatterPoint(risk=float(risk),
                                   annual_return=float(c.metrics.annual_return),
                                   is_best=c.index == best,
                                   is_min_risk=c.index == min_risk))
    return points


def _command(fn):
    """Run a command body with partial-output cleanup on failure."""

    def wrapper(config: RunConfig) -> Outcome:
        tracker = ArtifactTracker()
        outcome = Outcome()
        config.out_dir.mkdir(parents=True, exist_ok=True)
        try:
            fn(config, tracker, outcome)
        except BaseException:
            tracker.cleanup()
            raise
        outcome.artifacts = [str(p) for p in tracker.paths]
        return outcome

    return wrapper


@_command
def cmd_optimize(config: RunConfig, tracker: ArtifactTracker, outcome: Outcome):
    """Search every universe in the manifest and write the optimization
    artifacts (weights table, frontier data, selection record)."""
    for universe in load_manifest(config.manifest_path):
        run = _optimize_universe(universe, config, outcome.warnings)
        _emit_optimize_artifacts(run, config, tracker)


@_command
def cmd_backtest(config: RunConfig, tracker: ArtifactTracker, outcome: Outcome):
    """Re-evaluate previously optimized weights on the train and test windows
    and write curves plus the cross-universe summary. Requires the
    optimize artifacts in the output directory."""
    rows: list[SummaryRow] = []
    cums: dict = {}
    for universe in load_manifest(config.manifest_path):
        run = _restore_universe_run(universe, config, outcome.warnings)
        reports = _backtest_reports(run, config.cum_mode)
        _emit_backtest_artifacts(run, reports, config, tracker)
        rows.append(_summary_for(run, reports))
        cums[run.name] = _cumulative_map(reports)
    _emit_summary(rows, cums, config, tracker)
    outcome.summaries = rows


@_command
def cmd_frontier(config: RunConfig, tracker: ArtifactTracker, outcome: Outcome):
    """Render the frontier SVGs from previously written scatter data."""
    for universe in load_manifest(config.manifest_path):
        udir = config.out_dir / universe.name

        def points_from_csv(kind: RatioKind, udir=udir, name=universe.name):
            path = udir / f"frontier_{kind.value}.csv"
            if not path.exists():
                raise DataError(f"universe '{name}': missing {path.name}; run optimize first")
            return report.parse_frontier_csv(path)

        _emit_svgs(universe.name, points_from_csv, config, tracker, outcome.warnings)


@_command
def cmd_run(config: RunConfig, tracker: ArtifactTracker, outcome: Outcome):
    """Full pipeline in one pass: optimize, backtest and plot per universe,
    then the cross-universe summary."""
    rows: list[SummaryRow] = []
    cums: dict = {}
    for universe in load_manifest(config.manifest_path):
        run = _optimize_universe(universe, config, outcome.warnings)
        _emit_optimize_artifacts(run, config, tracker)
        reports = _backtest_reports(run, config.cum_mode)
        _emit_backtest_artifacts(run, reports, config, tracker)
        _emit_svgs(run.name, lambda kind, r=run.result: _scatter_points(r, kind),
                   config, tracker, outcome.warnings)
        rows.append(_summary_for(run, reports))
        cums[run.name] = _cumulative_map(reports)
    _emit_summary(rows, cums, config, tracker)
    outcome.summaries = rows


def _restore_universe_run(universe: UniverseSpec, config: RunConfig,
                          warnings: list[str]) -> UniverseRun:
    """Rebuild a UniverseRun for backtesting from the optimize artifacts,
    re-deriving the panels from the manifest and taking the selected
    weights (full precision) from optimization.json."""
    doc_path = config.out_dir / universe.name / "optimization.json"
    if not doc_path.exists():
        raise DataError(f"universe '{universe.name}': missing {doc_path.name}; run optimize first")
    with open(doc_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    train, test, excluded = _prepare_panels(universe, config.split, warnings)
    if tuple(doc["tickers"]) != train.tickers:
        raise DataError(f"universe '{universe.name}': optimization artifacts were built "
                        f"for tickers {doc['tickers']}, manifest now yields {list(train.tickers)}")
    return _RestoredRun(spec=universe, excluded=excluded, train=train, test=test,
                        objectives_doc=doc["objectives"])


@dataclass
class _RestoredRun(UniverseRun):
    """UniverseRun variant backed by the JSON artifact instead of a live
    OptimizationResult."""

    objectives_doc: dict = field(default_factory=dict)
    result: OptimizationResult = None  # unused in this variant

    def weights_for(self, kind: RatioKind) -> Weights | None:
        entry = self.objectives_doc[kind.value]
        if entry["best_index"] is None:
            return None
        values = np.array([entry["weights"][t] for t in self.train.tickers])
        return Weights(tickers=self.train.tickers, values=values)

    def available_objectives(self) -> tuple[RatioKind, ...]:
        return tuple(k for k in RatioKind
                     if self.objectives_doc[k.value]["best_index"] is not None)

    def training_ratios(self) -> dict[RatioKind, float | None]:
        return {k: self.objectives_doc[k.value]["ratio"] for k in RatioKind}
