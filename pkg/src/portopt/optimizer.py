"""Seeded Monte Carlo search over the weight simplex.

Every candidate index owns its own RNG substream derived from (seed, index),
so the candidate cloud is a pure function of the configuration: evaluation
order, chunking and thread count cannot change it, and growing the candidate
count only appends to the same cloud.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, NoValidCandidateError
from .market_data import AlignedReturnPanel
from .metrics import AssetStats, CovarianceMatrix
from .portfolio import PortfolioMetrics, RatioKind, Weights, evaluate

logger = logging.getLogger(__name__)

_MAX_REDRAWS = 16

ALL_OBJECTIVES = (RatioKind.SHARPE, RatioKind.SORTINO, RatioKind.CALMAR)


@dataclass(frozen=True)
class SearchConfig:
    """What to search: candidate count, seed, scoring constants."""

    num_candidates: int = 10000
    seed: int = 42
    annualization: float = 252.0
    risk_free_rate: float = 0.0
    objectives: tuple[RatioKind, ...] = ALL_OBJECTIVES
    sampler: str = "normalize"  # sum-normalized uniforms, or "dirichlet" (uniform on simplex)

    def __post_init__(self):
        if self.num_candidates < 1:
            raise ValueError("num_candidates must be >= 1")
        if self.annualization <= 0:
            raise ValueError("annualization factor must be positive")
        if self.risk_free_rate < 0:
            raise ValueError("risk-free rate must be >= 0")
        if self.sampler not in ("normalize", "dirichlet"):
            raise ValueError(f"unknown sampler {self.sampler!r}")


@dataclass(frozen=True)
class Candidate:
    index: int
    weights: Weights
    metrics: PortfolioMetrics


@dataclass(frozen=True)
class OptimizationResult:
    """Candidate cloud plus the per-objective selections.

    ``best``, ``min_risk`` and ``frontiers`` are keyed by objective; each
    objective ranks risk on its own axis (volatility, downside deviation,
    drawdown). A ``None`` selection means no candidate was valid there.
    """

    candidates: tuple[Candidate, ...]
    best: dict[RatioKind, int | None]
    min_risk: dict[RatioKind, int | None]
    frontiers: dict[RatioKind, tuple[int, ...]]

    @property
    def best_sharpe(self) -> int | None:
        return self.best[RatioKind.SHARPE]

    @property
    def best_sortino(self) -> int | None:
        return self.best[RatioKind.SORTINO]

    @property
    def best_calmar(self) -> int | None:
        return self.best[RatioKind.CALMAR]

    def best_ratio_value(self, kind: RatioKind) -> float | None:
        idx = self.best.get(kind)
        return None if idx is None else self.candidates[idx].metrics.ratio(kind)


def candidate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent RNG substream for one candidate index."""
    entropy = seed & 0xFFFFFFFFFFFFFFFF
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy, spawn_key=(index,)))


def sample_weights(tickers: Sequence[str], rng: np.random.Generator,
                   sampler: str = "normalize") -> Weights:
    """Draw one random long-only weight vector over ``tickers``.

    The default draws n uniform(0,1) variates and divides by their sum,
    which consumes exactly n draws. "dirichlet" gives the uniform
    distribution on the simplex instead.
    """
    n = len(tickers)
    if n < 2:
        raise ValueError("need at least 2 assets to sample weights")
    if sampler == "dirichlet":
        return Weights(tickers=tuple(tickers), values=rng.dirichlet(np.ones(n)))
    for _ in range(_MAX_REDRAWS):
        draws = rng.random(n)
        total = draws.sum()
        if total > 0.0:
            return Weights(tickers=tuple(tickers), values=draws / total)
    raise RuntimeError("rng returned an all-zero draw repeatedly")


def _risk_of(candidate: Candidate, kind: RatioKind) -> float | None:
    return candidate.metrics.risk(kind)


def select_max(candidates: Sequence[Candidate], kind: RatioKind) -> int:
    """Index of the highest valid ratio; ties go to the lowest index."""
    best_idx = None
    best_val = None
    for c in candidates:
        r = c.metrics.ratio(kind)
        if r is None:
            continue
        if best_val is None or r > best_val:
            best_val = r
            best_idx = c.index
    if best_idx is None:
        raise NoValidCandidateError(f"no candidate with a valid {kind.value} ratio")
    return best_idx


def select_min_risk(candidates: Sequence[Candidate], kind: RatioKind) -> int | None:
    """Index of the lowest risk on the objective's axis; ties go to the
    lowest index. None when no candidate has a defined risk there."""
    best_idx = None
    best_val = None
    for c in candidates:
        r = _risk_of(c, kind)
        if r is None:
            continue
        if best_val is None or r < best_val:
            best_val = r
            best_idx = c.index
    return best_idx


def frontier(candidates: Sequence[Candidate], kind: RatioKind) -> tuple[int, ...]:
    """Pareto-efficient candidates on (risk, annual return), risk ascending.

    A candidate is kept iff no other has risk <= and return >= with at least
    one strict. Candidates without a defined risk on this axis are skipped.
    """
    scored = [(c.metrics.risk(kind), c.metrics.annual_return, c.index)
              for c in candidates if c.metrics.risk(kind) is not None]
    if not scored:
        return ()
    risk = np.array([s[0] for s in scored])
    ret = np.array([s[1] for s in scored])
    idx = np.array([s[2] for s in scored])
    order = np.lexsort((idx, -ret, risk))
    kept: list[int] = []
    best_ret = None
    best_risk = None
    for pos in order:
        r, q = risk[pos], ret[pos]
        if best_ret is None or q > best_ret:
            kept.append(int(idx[pos]))
            best_ret, best_risk = q, r
        elif q == best_ret and r == best_risk:
            # exact duplicate of the current frontier point: neither dominates
            kept.append(int(idx[pos]))
    return tuple(kept)


def _build_candidate(index: int, tickers, panel, stats, cov, config: SearchConfig) -> Candidate:
    rng = candidate_rng(config.seed, index)
    weights = sample_weights(tickers, rng, sampler=config.sampler)
    metrics = evaluate(panel, weights, cov, stats, config.annualization, config.risk_free_rate)
    return Candidate(index=index, weights=weights, metrics=metrics)


def generate(
    panel: AlignedReturnPanel,
    stats: Sequence[AssetStats],
    cov: CovarianceMatrix,
    config: SearchConfig,
    workers: int = 1,
) -> OptimizationResult:
    """Build and score the full candidate cloud, then pick the selections.

    ``workers`` only chunks the evaluation across threads; the result is
    identical for any value because every candidate is derived from its own
    (seed, index) substream. A requested objective with no valid candidate
    gets a None selection and a logged diagnostic instead of an error.
    """
    tickers = panel.tickers
    if len(tickers) < 2:
        raise DataError("universe too small: need at least 2 assets")
    _require_same_universe(tickers, stats, cov)
    indices = range(config.num_candidates)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            candidates = list(pool.map(
                lambda i: _build_candidate(i, tickers, panel, stats, cov, config),
                indices,
            ))
    else:
        candidates = [_build_candidate(i, tickers, panel, stats, cov, config) for i in indices]

    best: dict[RatioKind, int | None] = {}
    min_risk: dict[RatioKind, int | None] = {}
    frontiers: dict[RatioKind, tuple[int, ...]] = {}
    for kind in config.objectives:
        try:
            best[kind] = select_max(candidates, kind)
        except NoValidCandidateError as exc:
            logger.warning("objective %s: %s", kind.value, exc)
            best[kind] = None
        min_risk[kind] = select_min_risk(candidates, kind)
        frontiers[kind] = frontier(candidates, kind)
    return OptimizationResult(
        candidates=tuple(candidates),
        best=best,
        min_risk=min_risk,
        frontiers=frontiers,
    )


def _require_same_universe(tickers, stats, cov):
    stats_tickers = tuple(s.ticker for s in stats)
    if stats_tickers != tuple(tickers):
        raise ValueError(f"stats tickers {stats_tickers} do not match panel {tuple(tickers)}")
    if cov.tickers != tuple(tickers):
        raise ValueError(f"covariance tickers {cov.tickers} do not match panel {tuple(tickers)}")
