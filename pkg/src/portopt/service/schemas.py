"""Pydantic request/response models for the HTTP surface."""

from __future__ import annotations

import datetime as dt
from typing import Literal

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    """Flat mirror of the CLI flags; every command endpoint accepts it."""

    manifest: str
    out: str
    train_start: dt.date = dt.date(2017, 1, 1)
    train_end: dt.date = dt.date(2020, 12, 31)
    test_start: dt.date = dt.date(2021, 1, 1)
    test_end: dt.date = dt.date(2021, 12, 31)
    candidates: int = Field(default=10000, ge=1)
    seed: int = 42
    risk_free: float = Field(default=0.0, ge=0.0)
    annualization: float = Field(default=252.0, gt=0.0)
    cum_mode: Literal["arithmetic", "compounded"] = "arithmetic"
    sampler: Literal["normalize", "dirichlet"] = "normalize"
    workers: int = Field(default=1, ge=1)


class SummaryRowModel(BaseModel):
    universe: str
    best_train: str | None
    best_test: str | None
    max_sharpe: float | None
    max_sortino: float | None
    max_calmar: float | None


class CommandResponse(BaseModel):
    command: str
    summaries: list[SummaryRowModel] = []
    artifacts: list[str] = []
    warnings: list[str] = []


class HealthResponse(BaseModel):
    status: str
    version: str
