"""FastAPI service wrapping the pipeline.

The service runs the pipeline on its own filesystem: manifest and output
paths in a request are resolved server-side. Domain errors (bad files,
empty windows, tiny universes) come back as HTTP 400 with the diagnostic
in ``detail``.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__, pipeline
from ..errors import PortfolioError
from ..market_data import SplitSpec
from ..optimizer import SearchConfig
from .schemas import CommandResponse, HealthResponse, RunRequest, SummaryRowModel

_COMMANDS = {
    "optimize": pipeline.cmd_optimize,
    "backtest": pipeline.cmd_backtest,
    "frontier": pipeline.cmd_frontier,
    "run": pipeline.cmd_run,
}


def _to_config(req: RunRequest) -> pipeline.RunConfig:
    manifest = Path(req.manifest)
    if not manifest.exists():
        raise HTTPException(status_code=400, detail=f"manifest not found: {manifest}")
    try:
        split = SplitSpec(req.train_start, req.train_end, req.test_start, req.test_end)
        search = SearchConfig(
            num_candidates=req.candidates,
            seed=req.seed,
            annualization=req.annualization,
            risk_free_rate=req.risk_free,
            sampler=req.sampler,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return pipeline.RunConfig(
        manifest_path=manifest,
        split=split,
        search=search,
        out_dir=Path(req.out),
        cum_mode=req.cum_mode,
        workers=req.workers,
    )


def _run_command(name: str, req: RunRequest) -> CommandResponse:
    config = _to_config(req)
    try:
        outcome = _COMMANDS[name](config)
    except (PortfolioError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return CommandResponse(
        command=name,
        summaries=[
            SummaryRowModel(
                universe=row.universe,
                best_train=None if row.best_train is None else row.best_train.value,
                best_test=None if row.best_test is None else row.best_test.value,
                max_sharpe=row.max_sharpe,
                max_sortino=row.max_sortino,
                max_calmar=row.max_calmar,
            )
            for row in outcome.summaries
        ],
        artifacts=outcome.artifacts,
        warnings=outcome.warnings,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="portopt service", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/optimize", response_model=CommandResponse)
    def optimize(req: RunRequest):
        return _run_command("optimize", req)

    @app.post("/backtest", response_model=CommandResponse)
    def backtest(req: RunRequest):
        return _run_command("backtest", req)

    @app.post("/frontier", response_model=CommandResponse)
    def frontier(req: RunRequest):
        return _run_command("frontier", req)

    @app.post("/run", response_model=CommandResponse)
    def run(req: RunRequest):
        return _run_command("run", req)

    return app


app = create_app()
