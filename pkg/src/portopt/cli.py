"""Command-line client for the portopt service.

The CLI never computes anything itself: it assembles a request from flags
(and an optional JSON config file, flags winning), sends it to the service,
and prints the response. By default the service runs in-process over an
ASGI transport; pass ``--server URL`` to target a running instance, or use
``portopt serve`` to start one.

The only environment variable honored is PORTOPT_LOG_LEVEL (log verbosity).
"""

from __future__ import annotations

import argparse
import asyncio
import datetime as dt
import json
import logging
import os
import sys

import httpx

COMMANDS = ("optimize", "backtest", "frontier", "run")

# flag name -> payload key (all optional; service defaults apply when absent)
_OPTIONAL_FIELDS = (
    "train_start", "train_end", "test_start", "test_end",
    "candidates", "seed", "risk_free", "annualization",
    "cum_mode", "sampler", "workers",
)


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portopt",
        description="Monte Carlo portfolio construction and backtesting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="universe manifest (JSON)")
    common.add_argument("--out", help="output directory for artifacts")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--train-start", type=_date, dest="train_start")
    common.add_argument("--train-end", type=_date, dest="train_end")
    common.add_argument("--test-start", type=_date, dest="test_start")
    common.add_argument("--test-end", type=_date, dest="test_end")
    common.add_argument("--candidates", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--risk-free", type=float, dest="risk_free")
    common.add_argument("--annualization", type=float)
    common.add_argument("--cum-mode", choices=("arithmetic", "compounded"), dest="cum_mode")
    common.add_argument("--sampler", choices=("normalize", "dirichlet"))
    common.add_argument("--workers", type=int)
    common.add_argument("--server", help="base URL of a running portopt service")

    for name, text in (
        ("optimize", "search the weight simplex and write optimization artifacts"),
        ("backtest", "evaluate optimized weights over both windows and write the summary"),
        ("frontier", "render frontier SVG plots from optimization artifacts"),
        ("run", "optimize, backtest and plot in one pass"),
    ):
        sub.add_parser(name, parents=[common], help=text)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def build_payload(args: argparse.Namespace) -> dict:
    """Merge config-file values with explicit flags (flags win)."""
    settings: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"error: cannot read config file {args.config}: {exc}")
        if not isinstance(loaded, dict):
            raise SystemExit(f"error: config file {args.config} must hold a JSON object")
        settings.update(loaded)
    for key in ("manifest", "out", *_OPTIONAL_FIELDS):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    for key in ("train_start", "train_end", "test_start", "test_end"):
        if isinstance(settings.get(key), dt.date):
            settings[key] = settings[key].isoformat()
    if not settings.get("manifest"):
        raise SystemExit("error: --manifest is required (flag or config file)")
    if not settings.get("out"):
        raise SystemExit("error: --out is required (flag or config file)")
    return settings


def _post_in_process(path: str, payload: dict) -> httpx.Response:
    from .service.app import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://portopt",
                                     timeout=None) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _post_remote(server: str, path: str, payload: dict) -> httpx.Response:
    with httpx.Client(base_url=server.rstrip("/"), timeout=None) as client:
        return client.post(path, json=payload)


def _print_response(body: dict):
    for row in body.get("summaries", []):
        ratios = " ".join(
            f"{key}={row[f'max_{key}']:.4f}" if row[f"max_{key}"] is not None else f"{key}=n/a"
            for key in ("sharpe", "sortino", "calmar")
        )
        print(f"{row['universe']}: best_train={row['best_train'] or 'n/a'} "
              f"best_test={row['best_test'] or 'n/a'} {ratios}")
    artifacts = body.get("artifacts", [])
    if artifacts:
        print(f"{len(artifacts)} artifact(s) written")
    for warning in body.get("warnings", []):
        print(f"warning: {warning}", file=sys.stderr)


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("PORTOPT_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    payload = build_payload(args)
    path = f"/{args.command}"
    try:
        if args.server:
            response = _post_remote(args.server, path, payload)
        else:
            response = _post_in_process(path, payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1

    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        return 1
    _print_response(response.json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
