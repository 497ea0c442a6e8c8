"""Artifact emission: weight tables, frontier scatter data, cumulative-return
curves, summary tables and self-contained SVG frontier plots.

Human-facing tables round to 4 decimals; machine-facing files (frontier
data, curves, JSON) carry full shortest-round-trip precision so re-parsing
reproduces the in-memory doubles exactly. Nothing here depends on wall
time, locale or dict-hash order, so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .backtest import BacktestReport, SummaryRow, Window
from .optimizer import OptimizationResult
from .portfolio import RatioKind

RISK_AXIS_LABEL = {
    RatioKind.SHARPE: "annual volatility",
    RatioKind.SORTINO: "downside deviation (annualized)",
    RatioKind.CALMAR: "maximum drawdown",
}


def _fmt4(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def _full(value: float) -> str:
    return repr(float(value))


class ArtifactTracker:
    """Collects every path written during a command so a failure can remove
    partial output instead of leaving a half-written tree behind."""

    def __init__(self):
        self.paths: list[Path] = []

    def record(self, path: Path) -> Path:
        self.paths.append(path)
        return path

    def cleanup(self):
        for path in self.paths:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass
        for parent in sorted({p.parent for p in self.paths}, reverse=True):
            try:
                parent.rmdir()  # only succeeds when we emptied it
            except OSError:
                pass
        self.paths.clear()


def _write_text(path: Path, text: str, tracker: ArtifactTracker) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    return tracker.record(path)


def write_weights_table(path: Path, tickers, weights_by_objective, tracker: ArtifactTracker) -> Path:
    """One row per asset, one 4-decimal column per objective (blank when the
    objective produced no valid selection)."""
    lines = ["ticker,max_sharpe,max_sortino,max_calmar"]
    for i, ticker in enumerate(tickers):
        cells = [ticker]
        for kind in RatioKind:
            w = weights_by_objective.get(kind)
            cells.append("" if w is None else f"{w.values[i]:.4f}")
        lines.append(",".join(cells))
    return _write_text(path, "\n".join(lines) + "\n", tracker)


def write_frontier_data(path: Path, result: OptimizationResult, kind: RatioKind,
                        tracker: ArtifactTracker) -> Path:
    """Full-precision candidate cloud on one objective's risk axis.

    Candidates without a defined risk value (no-downside streams on the
    Sortino axis) are omitted: they have no coordinate on this plot.
    """
    front = set(result.frontiers.get(kind, ()))
    best = result.best.get(kind)
    min_risk = result.min_risk.get(kind)
    lines = ["candidate,risk,annual_return,on_frontier,is_best,is_min_risk"]
    for c in result.candidates:
        risk = c.metrics.risk(kind)
        if risk is None:
            continue
        lines.append(",".join([
            str(c.index),
            _full(risk),
            _full(c.metrics.annual_return),
            "1" if c.index in front else "0",
            "1" if c.index == best else "0",
            "1" if c.index == min_risk else "0",
        ]))
    return _write_text(path, "\n".join(lines) + "\n", tracker)


def optimization_document(universe: str, tickers, excluded, result: OptimizationResult,
                          config) -> dict:
    """Machine-readable optimization record with full-precision weights."""
    objectives = {}
    for kind in RatioKind:
        best = result.best.get(kind)
        entry = {
            "risk_axis": RISK_AXIS_LABEL[kind],
            "best_index": best,
            "ratio": None if best is None else float(result.candidates[best].metrics.ratio(kind)),
            "min_risk_index": result.min_risk.get(kind),
            "weights": None if best is None else {
                t: float(w) for t, w in zip(tickers, result.candidates[best].weights.values)
            },
        }
        objectives[kind.value] = entry
    return {
        "universe": universe,
        "tickers": list(tickers),
        "excluded": list(excluded),
        "num_candidates": config.num_candidates,
        "seed": config.seed,
        "annualization": float(config.annualization),
        "risk_free_rate": float(config.risk_free_rate),
        "sampler": config.sampler,
        "objectives": objectives,
    }


def write_json(path: Path, document: dict, tracker: ArtifactTracker) -> Path:
    return _write_text(path, json.dumps(document, indent=2) + "\n", tracker)


def write_curve(path: Path, report: BacktestReport, tracker: ArtifactTracker) -> Path:
    lines = ["date,cumulative"]
    lines.extend(f"{d.isoformat()},{_full(v)}" for d, v in zip(report.dates, report.curve))
    return _write_text(path, "\n".join(lines) + "\n", tracker)


def write_summary_csv(path: Path, rows: list[SummaryRow], tracker: ArtifactTracker) -> Path:
    lines = ["universe,best_train,best_test,max_sharpe,max_sortino,max_calmar"]
    for row in rows:
        lines.append(",".join([
            row.universe,
            "" if row.best_train is None else row.best_train.value,
            "" if row.best_test is None else row.best_test.value,
            _fmt4(row.max_sharpe),
            _fmt4(row.max_sortino),
            _fmt4(row.max_calmar),
        ]))
    return _write_text(path, "\n".join(lines) + "\n", tracker)


def summary_document(rows: list[SummaryRow], cumulative_returns) -> dict:
    """Full-precision summary for programmatic consumers.

    ``cumulative_returns`` maps universe -> {objective -> {window -> value}}.
    """
    out = []
    for row in rows:
        cums = cumulative_returns.get(row.universe, {})
        out.append({
            "universe": row.universe,
            "best_train": None if row.best_train is None else row.best_train.value,
            "best_test": None if row.best_test is None else row.best_test.value,
            "max_ratios": {
                "sharpe": row.max_sharpe,
                "sortino": row.max_sortino,
                "calmar": row.max_calmar,
            },
            "cumulative_returns": {
                kind.value: {
                    window.value: cums.get(kind, {}).get(window)
                    for window in Window
                }
                for kind in RatioKind
            },
        })
    return {"rows": out}


# ---------------------------------------------------------------------------
# SVG frontier plots


@dataclass(frozen=True)
class ScatterPoint:
    risk: float
    annual_return: float
    is_best: bool
    is_min_risk: bool


_SVG_W, _SVG_H = 720, 540
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 78, 24, 46, 62


def _axis_scale(values):
    lo, hi = min(values), max(values)
    if hi - lo < 1e-15:
        pad = abs(hi) * 0.05 + 1e-6
        lo, hi = lo - pad, hi + pad
    else:
        pad = (hi - lo) * 0.05
        lo, hi = lo - pad, hi + pad
    return lo, hi


def render_frontier_svg(title: str, risk_label: str, points: list[ScatterPoint]) -> str:
    """Self-contained SVG scatter: grey candidate cloud, blue min-risk
    marker, red max-ratio marker."""
    if not points:
        raise ValueError("no candidates to plot")
    xlo, xhi = _axis_scale([p.risk for p in points])
    ylo, yhi = _axis_scale([p.annual_return for p in points])
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def sx(v):
        return _MARGIN_L + (v - xlo) / (xhi - xlo) * plot_w

    def sy(v):
        return _MARGIN_T + (yhi - v) / (yhi - ylo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>',
        f'<text x="{_SVG_W / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    for i in range(5):
        frac = i / 4.0
        xv = xlo + frac * (xhi - xlo)
        yv = ylo + frac * (yhi - ylo)
        x = sx(xv)
        y = sy(yv)
        parts.append(f'<line x1="{x:.2f}" y1="{_MARGIN_T + plot_h}" x2="{x:.2f}" '
                     f'y2="{_MARGIN_T + plot_h + 5}" stroke="#444444"/>')
        parts.append(f'<text x="{x:.2f}" y="{_MARGIN_T + plot_h + 19}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{xv:.4g}</text>')
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" x2="{_MARGIN_L}" '
                     f'y2="{y:.2f}" stroke="#444444"/>')
        parts.append(f'<text x="{_MARGIN_L - 9}" y="{y + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{yv:.4g}</text>')
    parts.append(f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_SVG_H - 16}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{risk_label}</text>')
    parts.append(f'<text x="20" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 20 {_MARGIN_T + plot_h / 2:.1f})">annual return</text>')
    parts.append('<g fill="#9aa7b4" fill-opacity="0.55">')
    parts.extend(f'<circle cx="{sx(p.risk):.2f}" cy="{sy(p.annual_return):.2f}" r="1.6"/>'
                 for p in points if not (p.is_best or p.is_min_risk))
    parts.append("</g>")
    for p in points:
        if p.is_min_risk:
            parts.append(f'<circle cx="{sx(p.risk):.2f}" cy="{sy(p.annual_return):.2f}" r="6" '
                         f'fill="blue" stroke="white" stroke-width="1.2"/>')
    for p in points:
        if p.is_best:
            parts.append(f'<circle cx="{sx(p.risk):.2f}" cy="{sy(p.annual_return):.2f}" r="6" '
                         f'fill="red" stroke="white" stroke-width="1.2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_frontier_svg(path: Path, title: str, kind: RatioKind,
                       points: list[ScatterPoint], tracker: ArtifactTracker) -> Path:
    svg = render_frontier_svg(title, RISK_AXIS_LABEL[kind], points)
    return _write_text(path, svg, tracker)


def parse_frontier_csv(path: Path) -> list[ScatterPoint]:
    """Re-read scatter data written by :func:`write_frontier_data`."""
    points = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            points.append(ScatterPoint(
                risk=float(row["risk"]),
                annual_return=float(row["annual_return"]),
                is_best=row["is_best"] == "1",
                is_min_risk=row["is_min_risk"] == "1",
            ))
    return points
