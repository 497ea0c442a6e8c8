import asyncio
import datetime as dt
from pathlib import Path

import httpx
import numpy as np
import pytest

from portopt.market_data import AlignedReturnPanel, PriceSeries

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


def service_request(method: str, path: str, payload: dict | None = None) -> httpx.Response:
    """Hit the service in-process over ASGI, exactly as the CLI does."""
    from portopt.service.app import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://testserver",
                                     timeout=None) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def write_csv(path: Path, rows, header="date,adj_close"):
    lines = [header] + [f"{d},{p}" for d, p in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def weekday_calendar(start: dt.date, count: int) -> list[dt.date]:
    """First `count` weekdays on/after `start`."""
    days = []
    day = start
    while len(days) < count:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return days


def series_from_prices(ticker: str, prices, start=dt.date(2020, 1, 1)) -> PriceSeries:
    dates = weekday_calendar(start, len(prices))
    return PriceSeries(ticker=ticker, dates=tuple(dates), closes=np.asarray(prices, dtype=float))


def random_panel(n_assets: int, n_rows: int, seed: int, mean=0.0005, vol=0.015) -> AlignedReturnPanel:
    """Synthetic aligned panel of normal daily returns."""
    rng = np.random.default_rng(seed)
    returns = rng.normal(mean, vol, size=(n_rows, n_assets))
    dates = weekday_calendar(dt.date(2018, 1, 1), n_rows)
    tickers = tuple(f"A{i}" for i in range(n_assets))
    return AlignedReturnPanel(tickers=tickers, dates=tuple(dates), returns=returns)


def panel_inputs(panel: AlignedReturnPanel, annualization: float = 252.0):
    """Asset stats and covariance for a panel, as generate() expects them."""
    from portopt.metrics import asset_stats, covariance
    stats = [asset_stats(panel.returns[:, i], annualization, ticker=t)
             for i, t in enumerate(panel.tickers)]
    return stats, covariance(panel)


def dominant_asset_panel(n_rows: int = 500, seed: int = 123) -> AlignedReturnPanel:
    """Two assets where the first dominates: higher return, lower volatility,
    lower downside deviation, lower drawdown."""
    rng = np.random.default_rng(seed)
    returns = np.column_stack([
        rng.normal(0.0015, 0.008, n_rows),
        rng.normal(-0.001, 0.03, n_rows),
    ])
    dates = weekday_calendar(dt.date(2018, 1, 1), n_rows)
    return AlignedReturnPanel(tickers=("GOOD", "BAD"), dates=tuple(dates), returns=returns)


def make_universe(tmp_path, name, price_fn, n_assets=2, n_days=120):
    """Write a synthetic universe (CSV per asset + manifest), returning the
    manifest path. price_fn(rng, day_index) -> daily simple return. Data
    starts before the 2017-01-01 window start so nothing is excluded."""
    import json

    day = dt.date(2016, 12, 1)
    days = []
    while len(days) < n_days:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    assets = []
    for a in range(n_assets):
        rng = np.random.default_rng(100 + a)
        price = 100.0 * (1.0 + a)
        rows = [(days[0].isoformat(), repr(price))]
        for t in range(1, n_days):
            price *= 1.0 + price_fn(rng, t)
            rows.append((days[t].isoformat(), repr(price)))
        write_csv(tmp_path / f"{name}_{a}.csv", rows)
        assets.append({"ticker": f"T{a}", "csv": f"{name}_{a}.csv"})
    manifest = tmp_path / f"{name}.json"
    manifest.write_text(json.dumps({"name": name, "assets": assets}))
    return manifest


@pytest.fixture(scope="session")
def fixture_manifest() -> Path:
    path = FIXTURE_DIR / "auto_like" / "manifest.json"
    assert path.exists(), "bundled fixture universe missing; run scripts/make_fixtures.py"
    return path
