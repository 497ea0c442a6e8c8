import filecmp
import json
from pathlib import Path

from conftest import make_universe, service_request


def base_payload(fixture_manifest, out, **overrides):
    payload = {"manifest": str(fixture_manifest), "out": str(out), "candidates": 200}
    payload.update(overrides)
    return payload


def degenerate_split():
    return {
        "train_start": "2017-01-01", "train_end": "2017-03-31",
        "test_start": "2017-04-01", "test_end": "2017-12-31",
    }


class TestHealth:
    def test_health(self):
        r = service_request("GET", "/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"


class TestRunEndpoint:
    def test_full_run_on_fixture(self, fixture_manifest, tmp_path):
        r = service_request("POST", "/run", base_payload(fixture_manifest, tmp_path / "out"))
        assert r.status_code == 200
        body = r.json()
        [row] = body["summaries"]
        assert row["universe"] == "auto_like"
        assert row["best_train"] in ("sharpe", "sortino", "calmar")
        assert all(row[k] is not None for k in ("max_sharpe", "max_sortino", "max_calmar"))
        assert any("excluded JNT" in w for w in body["warnings"])
        for artifact in body["artifacts"]:
            assert Path(artifact).exists()
        assert (tmp_path / "out" / "summary.csv").exists()
        assert (tmp_path / "out" / "auto_like" / "frontier_sharpe.svg").exists()

    def test_missing_manifest_is_400(self, tmp_path):
        r = service_request("POST", "/run", {"manifest": str(tmp_path / "no.json"),
                                             "out": str(tmp_path / "out")})
        assert r.status_code == 400
        assert "manifest not found" in r.json()["detail"]

    def test_bad_window_is_400_and_cleans_up(self, fixture_manifest, tmp_path):
        out = tmp_path / "out"
        r = service_request("POST", "/run", base_payload(
            fixture_manifest, out, test_start="2030-01-01", test_end="2030-12-31"))
        assert r.status_code == 400
        assert "test window" in r.json()["detail"]
        assert not any(out.rglob("*")) if out.exists() else True

    def test_invalid_split_order_is_400(self, fixture_manifest, tmp_path):
        r = service_request("POST", "/run", base_payload(
            fixture_manifest, tmp_path, test_start="2019-01-01", test_end="2018-01-01"))
        assert r.status_code == 400

    def test_single_asset_universe_is_400(self, tmp_path):
        manifest = make_universe(tmp_path, "solo",
                                 lambda rng, t: float(rng.normal(0.0005, 0.01)), n_assets=1)
        r = service_request("POST", "/run", {"manifest": str(manifest),
                                             "out": str(tmp_path / "out"),
                                             "candidates": 10, **degenerate_split()})
        assert r.status_code == 400
        assert "too small" in r.json()["detail"]


class TestStagedCommands:
    def test_staged_chain_equals_single_run(self, fixture_manifest, tmp_path):
        staged, single = tmp_path / "staged", tmp_path / "single"
        for path, cmd in ((staged, "optimize"), (staged, "backtest"), (staged, "frontier")):
            r = service_request("POST", f"/{cmd}", base_payload(fixture_manifest, path))
            assert r.status_code == 200
        r = service_request("POST", "/run", base_payload(fixture_manifest, single))
        assert r.status_code == 200
        comparison = filecmp.dircmp(staged, single)
        assert not comparison.diff_files
        assert not comparison.left_only and not comparison.right_only
        sub = filecmp.dircmp(staged / "auto_like", single / "auto_like")
        assert not sub.diff_files
        assert not sub.left_only and not sub.right_only

    def test_backtest_without_optimize_is_400(self, fixture_manifest, tmp_path):
        r = service_request("POST", "/backtest", base_payload(fixture_manifest, tmp_path / "x"))
        assert r.status_code == 400
        assert "run optimize first" in r.json()["detail"]

    def test_frontier_without_optimize_is_400(self, fixture_manifest, tmp_path):
        r = service_request("POST", "/frontier", base_payload(fixture_manifest, tmp_path / "x"))
        assert r.status_code == 400
        assert "missing frontier_sharpe.csv" in r.json()["detail"]


class TestDegenerateUniverses:
    def test_all_positive_returns_skip_sortino_and_calmar(self, tmp_path):
        manifest = make_universe(tmp_path, "sunny",
                                 lambda rng, t: float(rng.uniform(0.0001, 0.01)))
        out = tmp_path / "out"
        r = service_request("POST", "/run", {"manifest": str(manifest), "out": str(out),
                                             "candidates": 50, **degenerate_split()})
        assert r.status_code == 200
        body = r.json()
        [row] = body["summaries"]
        assert row["max_sortino"] is None
        assert row["max_calmar"] is None  # no drawdown either on a rising market
        assert row["max_sharpe"] is not None
        assert row["best_train"] == "sharpe"
        assert any("sortino" in w and "skipped" in w for w in body["warnings"])
        weights_rows = (out / "sunny" / "weights.csv").read_text().splitlines()[1:]
        assert all(line.split(",")[2] == "" for line in weights_rows)  # sortino column blank

    def test_zero_volatility_universe_completes_with_all_invalid(self, tmp_path):
        manifest = make_universe(tmp_path, "flat", lambda rng, t: 0.001)
        r = service_request("POST", "/run", {"manifest": str(manifest),
                                             "out": str(tmp_path / "out"),
                                             "candidates": 20, **degenerate_split()})
        assert r.status_code == 200
        body = r.json()
        [row] = body["summaries"]
        assert row["max_sharpe"] is None
        assert row["best_train"] is None
        assert any("sharpe" in w and "skipped" in w for w in body["warnings"])


class TestBatchManifest:
    def test_rows_follow_manifest_order(self, fixture_manifest, tmp_path):
        fixture_dir = fixture_manifest.parent
        single = json.loads(fixture_manifest.read_text())
        for asset in single["assets"]:
            asset["csv"] = str(fixture_dir / asset["csv"])
        batch = {"universes": [dict(single, name=f"u{i}") for i in range(3)]}
        manifest = tmp_path / "batch.json"
        manifest.write_text(json.dumps(batch))
        out = tmp_path / "out"
        r = service_request("POST", "/run", {"manifest": str(manifest), "out": str(out),
                                             "candidates": 60})
        assert r.status_code == 200
        names = [row["universe"] for row in r.json()["summaries"]]
        assert names == ["u0", "u1", "u2"]
        lines = (out / "summary.csv").read_text().splitlines()
        assert [line.split(",")[0] for line in lines[1:]] == ["u0", "u1", "u2"]
