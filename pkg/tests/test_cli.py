"""CLI behavior: output shapes and exit codes (0/2/3/4)."""

import json

import pytest
from click.testing import CliRunner

from amm_pathfinder.cli import main
from amm_pathfinder.fixtures import fixture_path


@pytest.fixture
def runner():
    return CliRunner()


def snapshot(name):
    return str(fixture_path(name))


class TestRouteCommand:
    def test_basic_route_json(self, runner):
        result = runner.invoke(
            main,
            ["route", "--snapshot", snapshot("single_pool"), "--src", "A", "--dst", "B", "--amount", "10"],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["amount_out"] == pytest.approx(9.090909090909092, rel=1e-12)
        assert payload["plan"][0]["token_in"] == "A"
        assert payload["rounds"] == 2

    def test_split_route_json(self, runner):
        result = runner.invoke(
            main,
            [
                "route",
                "--snapshot",
                snapshot("two_path"),
                "--src",
                "A",
                "--dst",
                "C",
                "--amount",
                "100",
                "--splits",
                "2",
            ],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["k"] == 2
        assert payload["total_out"] > 83.34

    def test_random_strategy_with_seed(self, runner):
        args = [
            "route",
            "--snapshot",
            snapshot("triangle"),
            "--src",
            "A",
            "--dst",
            "C",
            "--amount",
            "10",
            "--strategy",
            "random",
            "--seed",
            "7",
        ]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == 0
        a, b = json.loads(first.output), json.loads(second.output)
        a.pop("elapsed_s"), b.pop("elapsed_s")  # wall clock is not part of the contract
        assert a == b

    def test_capital_usd_with_prices(self, runner, tmp_path):
        prices = tmp_path / "prices.json"
        prices.write_text(json.dumps({"A": 2.0, "B": 1.0}))
        result = runner.invoke(
            main,
            [
                "route",
                "--snapshot",
                snapshot("single_pool"),
                "--src",
                "A",
                "--dst",
                "B",
                "--capital-usd",
                "20",
                "--prices",
                str(prices),
            ],
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["amount_in"] == 10.0

    def test_unknown_token_exits_3(self, runner):
        result = runner.invoke(
            main,
            ["route", "--snapshot", snapshot("single_pool"), "--src", "A", "--dst", "Z", "--amount", "1"],
        )
        assert result.exit_code == 3

    def test_conflicting_amount_flags_exit_2(self, runner):
        result = runner.invoke(
            main,
            [
                "route",
                "--snapshot",
                snapshot("single_pool"),
                "--src",
                "A",
                "--dst",
                "B",
                "--amount",
                "1",
                "--capital-usd",
                "5",
            ],
        )
        assert result.exit_code == 2

    def test_missing_amount_exits_2(self, runner):
        result = runner.invoke(
            main,
            ["route", "--snapshot", snapshot("single_pool"), "--src", "A", "--dst", "B"],
        )
        assert result.exit_code == 2

    def test_malformed_snapshot_exits_4(self, runner, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"token0":"A","token1":"B","reserve0":-1,"reserve1":1}\n')
        result = runner.invoke(
            main,
            ["route", "--snapshot", str(bad), "--src", "A", "--dst", "B", "--amount", "1"],
        )
        assert result.exit_code == 4

    def test_mismatched_dex_count_exits_2(self, runner):
        result = runner.invoke(
            main,
            [
                "route",
                "--snapshot",
                snapshot("single_pool"),
                "--dex",
                "d1",
                "--dex",
                "d2",
                "--src",
                "A",
                "--dst",
                "B",
                "--amount",
                "1",
            ],
        )
        assert result.exit_code == 2


class TestDfsCommand:
    def test_dfs_route(self, runner):
        result = runner.invoke(
            main,
            [
                "dfs",
                "--snapshot",
                snapshot("triangle"),
                "--src",
                "A",
                "--dst",
                "C",
                "--amount",
                "10",
                "--max-hops",
                "3",
            ],
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["amount_out"] == pytest.approx(
            8.333333333333334, rel=1e-12
        )

    def test_no_route_exits_3(self, runner):
        result = runner.invoke(
            main,
            ["dfs", "--snapshot", snapshot("single_pool"), "--src", "A", "--dst", "A", "--amount", "1"],
        )
        assert result.exit_code == 3


class TestGraphStats:
    def test_stats_single_dex(self, runner):
        result = runner.invoke(main, ["graph", "stats", "--snapshot", snapshot("triangle")])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["per_dex"]["default"]["line_graph_links"] == 6

    def test_stats_aggregator(self, runner):
        result = runner.invoke(main, ["graph", "stats", "--snapshot", snapshot("two_dex_pool")])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert set(payload["per_dex"]) == {"dex1", "dex2"}
        assert payload["aggregator"]["line_graph_vertices"] == 4


class TestBenchCommands:
    def bench_config(self, tmp_path, experiment):
        cfg = {
            "experiment": experiment,
            "graph_source": {
                "type": "synthetic",
                "n_tokens": 8,
                "n_pools": 12,
                "seed": 3,
                "reserves": {
                    "kind": "priced",
                    "depth_min": 1e4,
                    "depth_max": 1e6,
                    "price_min": 0.1,
                    "price_max": 10.0,
                    "noise": 1e-3,
                },
            },
            "capital_usd": 100.0,
            "methods": [{"kind": "lg_bfs"}, {"kind": "dfs", "max_hops": 3}]
            if experiment == "ratio"
            else [{"kind": "lg_bfs"}],
            "sizes": [6, 8],
            "trials": 2,
        }
        path = tmp_path / f"{experiment}.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_bench_ratio_writes_outputs(self, runner, tmp_path):
        cfg = self.bench_config(tmp_path, "ratio")
        out = tmp_path / "out"
        result = runner.invoke(main, ["bench", "ratio", "--config", str(cfg), "--out", str(out)])
        assert result.exit_code == 0, result.output
        for name in ("ratio_records.csv", "ratio_cdf.csv", "excluded.csv", "timings.csv", "manifest.json"):
            assert (out / name).exists()

    def test_bench_scaling_writes_outputs(self, runner, tmp_path):
        cfg = self.bench_config(tmp_path, "scaling")
        out = tmp_path / "out"
        result = runner.invoke(main, ["bench", "scaling", "--config", str(cfg), "--out", str(out)])
        assert result.exit_code == 0, result.output
        for name in ("scaling_structure.csv", "scaling_timing.csv", "manifest.json"):
            assert (out / name).exists()

    def test_bad_config_exits_2(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"experiment": "ratio", "methods": []}))
        result = runner.invoke(main, ["bench", "ratio", "--config", str(path), "--out", str(tmp_path / "o")])
        assert result.exit_code == 2


class TestVersion:
    def test_version_flag(self, runner):
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert "0.1.0" in result.output
