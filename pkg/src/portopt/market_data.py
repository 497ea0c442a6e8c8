"""Price ingestion, daily returns, calendar alignment and train/test splitting.

Input CSVs carry one asset each: header ``date,adj_close``, ISO dates in
ascending order, positive adjusted-close prices. A JSON manifest groups
assets into one or more named universes.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)


def _frozen_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Dated adjusted-close observations for one asset.

    Dates are strictly increasing and every price is positive; both are
    enforced at construction.
    """

    ticker: str
    dates: tuple[dt.date, ...]
    closes: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "closes", _frozen_array(self.closes))
        if len(self.dates) != len(self.closes):
            raise ValueError(f"{self.ticker}: {len(self.dates)} dates vs {len(self.closes)} prices")
        if len(self.dates) == 0:
            raise ValueError(f"{self.ticker}: empty series")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur == prev:
                raise DataError(f"{self.ticker}: duplicate date {cur}")
            if cur < prev:
                raise DataError(f"{self.ticker}: dates not in ascending order at {cur}")
        if np.any(self.closes <= 0.0):
            bad = self.dates[int(np.argmax(self.closes <= 0.0))]
            raise DataError(f"{self.ticker}: non-positive price on {bad}")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class AlignedReturnPanel:
    """Calendar-aligned daily simple returns for a universe of assets.

    ``returns`` is a T x n matrix; row t holds the return from the previous
    aligned date to ``dates[t]`` for every asset.
    """

    tickers: tuple[str, ...]
    dates: tuple[dt.date, ...]
    returns: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "returns", _frozen_array(self.returns))
        if self.returns.ndim != 2:
            raise ValueError("returns must be a 2-D matrix")
        t, n = self.returns.shape
        if n != len(self.tickers) or t != len(self.dates):
            raise ValueError(f"shape mismatch: returns {t}x{n}, {len(self.dates)} dates, {len(self.tickers)} tickers")
        if n < 2:
            raise ValueError("panel needs at least 2 assets")
        if t < 2:
            raise ValueError("panel needs at least 2 return rows")

    @property
    def num_assets(self) -> int:
        return self.returns.shape[1]

    @property
    def num_rows(self) -> int:
        return self.returns.shape[0]

    def column(self, ticker: str) -> np.ndarray:
        return self.returns[:, self.tickers.index(ticker)]


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint training and test windows, training first."""

    train_start: dt.date
    train_end: dt.date
    test_start: dt.date
    test_end: dt.date

    def __post_init__(self):
        if not (self.train_start < self.train_end < self.test_start <= self.test_end):
            raise ValueError(
                "split windows must satisfy train_start < train_end < test_start <= test_end, "
                f"got {self.train_start}..{self.train_end} / {self.test_start}..{self.test_end}"
            )


def load_prices(path, ticker: str) -> PriceSeries:
    """Parse one asset's CSV into a :class:`PriceSeries`.

    Rows with a missing or unparseable date/price are dropped and counted in
    a single warning. Non-positive prices, duplicate dates and out-of-order
    dates are hard errors: they point at a corrupt file, not a gap.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"date", "adj_close"} <= set(reader.fieldnames):
                raise DataError(f"{path}: expected header with 'date' and 'adj_close' columns")
            dates: list[dt.date] = []
            closes: list[float] = []
            dropped = 0
            for row in reader:
                raw_date = (row.get("date") or "").strip()
                raw_close = (row.get("adj_close") or "").strip()
                try:
                    day = dt.date.fromisoformat(raw_date)
                    close = float(raw_close)
                except ValueError:
                    dropped += 1
                    continue
                if not np.isfinite(close):
                    dropped += 1
                    continue
                if close <= 0.0:
                    raise DataError(f"{ticker}: non-positive price {close} on {raw_date} in {path}")
                dates.append(day)
                closes.append(close)
    except OSError as exc:
        raise DataError(f"cannot read price file {path}: {exc}") from exc
    if dropped:
        logger.warning("%s: dropped %d row(s) with missing or unparseable values in %s", ticker, dropped, path)
    if not dates:
        raise DataError(f"{ticker}: no valid rows in {path}")
    return PriceSeries(ticker=ticker, dates=tuple(dates), closes=np.array(closes))


def compute_daily_returns(series: PriceSeries) -> list[tuple[dt.date, float]]:
    """Simple daily returns: p[t]/p[t-1] - 1, dated at the later day."""
    if len(series) < 2:
        raise DataError(f"{series.ticker}: need at least 2 observations to compute returns")
    rets = series.closes[1:] / series.closes[:-1] - 1.0
    return list(zip(series.dates[1:], (float(r) for r in rets)))


def align(series_list: Sequence[PriceSeries]) -> AlignedReturnPanel:
    """Inner-join the series' calendars and compute returns on the shared dates.

    Dates missing from any series are dropped for all of them; returns then
    bridge the gap between consecutive shared dates. No values are ever
    filled in.
    """
    if len(series_list) < 2:
        raise DataError("need at least 2 price series to build a panel")
    tickers = tuple(s.ticker for s in series_list)
    if len(set(tickers)) != len(tickers):
        raise DataError(f"duplicate tickers in universe: {tickers}")
    common = set(series_list[0].dates)
    for s in series_list[1:]:
        common &= set(s.dates)
    if len(common) < 3:
        raise DataError(f"insufficient overlap: only {len(common)} common date(s) across {tickers}")
    calendar = sorted(common)
    columns = []
    for s in series_list:
        by_date = dict(zip(s.dates, s.closes))
        closes = np.array([by_date[d] for d in calendar])
        columns.append(closes[1:] / closes[:-1] - 1.0)
    return AlignedReturnPanel(
        tickers=tickers,
        dates=tuple(calendar[1:]),
        returns=np.column_stack(columns),
    )


def filter_full_history(
    series_list: Sequence[PriceSeries], window_start: dt.date
) -> tuple[list[PriceSeries], list[str]]:
    """Drop assets whose history starts after ``window_start``.

    Exclusions are returned (and logged), never applied silently.
    """
    kept: list[PriceSeries] = []
    excluded: list[str] = []
    for s in series_list:
        if s.dates[0] > window_start:
            excluded.append(s.ticker)
            logger.warning(
                "%s excluded: first observation %s is after window start %s",
                s.ticker, s.dates[0], window_start,
            )
        else:
            kept.append(s)
    return kept, excluded


def split(panel: AlignedReturnPanel, spec: SplitSpec) -> tuple[AlignedReturnPanel, AlignedReturnPanel]:
    """Slice the panel's return rows into the training and test windows."""
    masks = {
        "train": np.array([spec.train_start <= d <= spec.train_end for d in panel.dates], dtype=bool),
        "test": np.array([spec.test_start <= d <= spec.test_end for d in panel.dates], dtype=bool),
    }
    out = []
    for name, mask in masks.items():
        count = int(mask.sum())
        if count == 0:
            raise DataError(f"empty {name} window: no panel dates in range")
        if count < 2:
            raise DataError(f"{name} window too short: {count} return row(s)")
        out.append(AlignedReturnPanel(
            tickers=panel.tickers,
            dates=tuple(d for d, m in zip(panel.dates, mask) if m),
            returns=panel.returns[mask],
        ))
    return out[0], out[1]


@dataclass(frozen=True)
class AssetEntry:
    """One manifest record: where an asset's prices live."""

    ticker: str
    csv_path: Path
    index_weight: float | None = None


@dataclass(frozen=True)
class UniverseSpec:
    name: str
    assets: tuple[AssetEntry, ...]


def load_manifest(path) -> list[UniverseSpec]:
    """Read a universe manifest (JSON).

    Two layouts are accepted: a single universe object
    ``{"name": ..., "assets": [{"ticker": ..., "csv": ..., "index_weight": ...}]}``
    or a batch ``{"universes": [<universe object>, ...]}``. Relative CSV paths
    are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest {path} is not valid JSON: {exc}") from exc

    if isinstance(doc, dict) and "universes" in doc:
        raw_universes = doc["universes"]
    elif isinstance(doc, dict):
        raw_universes = [doc]
    else:
        raise DataError(f"manifest {path}: expected a JSON object")

    base = path.parent
    universes = []
    for i, raw in enumerate(raw_universes):
        name = raw.get("name")
        assets_raw = raw.get("assets")
        if not name or not isinstance(assets_raw, list) or not assets_raw:
            raise DataError(f"manifest {path}: universe #{i} needs a 'name' and a non-empty 'assets' list")
        assets = []
        for entry in assets_raw:
            ticker = entry.get("ticker")
            csv_rel = entry.get("csv")
            if not ticker or not csv_rel:
                raise DataError(f"manifest {path}: universe '{name}' has an asset without 'ticker' or 'csv'")
            csv_path = Path(csv_rel)
            if not csv_path.is_absolute():
                csv_path = base / csv_path
            weight = entry.get("index_weight")
            assets.append(AssetEntry(ticker=ticker, csv_path=csv_path,
                                     index_weight=None if weight is None else float(weight)))
        universes.append(UniverseSpec(name=name, assets=tuple(assets)))
    names = [u.name for u in universes]
    if len(set(names)) != len(names):
        raise DataError(f"manifest {path}: duplicate universe names")
    return universes
