#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture universe.

Ten geometric-Brownian price paths on a weekday calendar spanning
2016-01-01 .. 2021-12-31. Nine assets cover the whole range; one (JNT)
starts only in late 2017, so the default 2017-01-01 window start excludes
it and exercises the short-history filter. Deterministic: fixed seed,
prices written to 4 decimals.

Run from the repository root: python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "auto_like"
SEED = 20170101

FULL_HISTORY = [
    # ticker, index weight annotation
    ("AXL", 19.53), ("BRG", 17.11), ("CMP", 15.85), ("DRV", 8.37), ("ENG", 7.15),
    ("FRM", 6.33), ("GRS", 3.73), ("HUB", 3.54), ("IGN", 3.48),
]
LATE_START = ("JNT", 3.42, dt.date(2017, 11, 2))

START = dt.date(2016, 1, 1)
END = dt.date(2021, 12, 31)


def weekdays(start: dt.date, end: dt.date) -> list[dt.date]:
    days = []
    day = start
    while day <= end:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return days


def gbm_path(rng: np.random.Generator, n: int, p0: float, mu: float, sigma: float) -> np.ndarray:
    log_returns = rng.normal(mu, sigma, size=n - 1)
    return p0 * np.concatenate(([1.0], np.exp(np.cumsum(log_returns))))


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    calendar = weekdays(START, END)
    rng = np.random.default_rng(SEED)
    assets = []
    for ticker, weight in FULL_HISTORY:
        p0 = float(rng.uniform(80.0, 2500.0))
        mu = float(rng.uniform(0.0002, 0.0010))
        sigma = float(rng.uniform(0.012, 0.028))
        prices = gbm_path(rng, len(calendar), p0, mu, sigma)
        _write_csv(OUT_DIR / f"{ticker.lower()}.csv", calendar, prices)
        assets.append({"ticker": ticker, "csv": f"{ticker.lower()}.csv", "index_weight": weight})

    ticker, weight, first_day = LATE_START
    late_calendar = [d for d in calendar if d >= first_day]
    p0 = float(rng.uniform(80.0, 2500.0))
    prices = gbm_path(rng, len(late_calendar), p0, 0.0006, 0.02)
    _write_csv(OUT_DIR / f"{ticker.lower()}.csv", late_calendar, prices)
    assets.append({"ticker": ticker, "csv": f"{ticker.lower()}.csv", "index_weight": weight})

    manifest = {"name": "auto_like", "assets": assets}
    (OUT_DIR / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(assets)} assets to {OUT_DIR}")


def _write_csv(path: Path, dates, prices):
    lines = ["date,adj_close"]
    lines.extend(f"{d.isoformat()},{p:.4f}" for d, p in zip(dates, prices))
    path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
