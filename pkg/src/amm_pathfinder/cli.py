"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 no route, 4 data error.
Log verbosity comes from AMM_PATHFINDER_LOG (off|warn|info|debug).
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import configure_logging
from ._version import __version__
from .bench import (
    ExperimentConfig,
    run_ratio_experiment,
    run_scaling_experiment,
    write_ratio_outputs,
    write_scaling_outputs,
)
from .errors import ConfigError, DataError, NoRouteError
from .estimators import DfsRouter, LineGraphRouter
from .linegraph import line_graph_stats
from .marketdata import FilterPolicy, filter_pools, load_prices, load_snapshot
from .tokengraph import build_graph, merge_graphs

EXIT_CONFIG = 2
EXIT_NO_ROUTE = 3
EXIT_DATA = 4


def _exit_codes(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except NoRouteError as exc:
            click.echo(f"no route: {exc}", err=True)
            sys.exit(EXIT_NO_ROUTE)
        except (DataError, OSError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(EXIT_DATA)
        except ValueError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)

    return wrapper


def _load_pools(snapshots, dexes):
    if dexes and len(dexes) != len(snapshots):
        raise ConfigError(
            f"{len(snapshots)} snapshot files but {len(dexes)} --dex names; counts must match"
        )
    pools = []
    for i, path in enumerate(snapshots):
        dex = dexes[i] if dexes else None
        pools.extend(load_snapshot(path, dex=dex))
    return pools


def _resolve_amount(amount, capital_usd, prices_path, src):
    if amount is not None and capital_usd is not None:
        raise ConfigError("pass either --amount or --capital-usd, not both")
    if amount is not None:
        return amount
    if capital_usd is None:
        raise ConfigError("one of --amount or --capital-usd is required")
    if prices_path is None:
        raise ConfigError("--capital-usd requires --prices")
    prices = load_prices(prices_path)
    if src not in prices:
        raise ConfigError(f"price file has no entry for source token {src!r}")
    return capital_usd / prices[src]


@click.group()
@click.version_option(version=__version__)
def main():
    """Token routing over constant-product AMM pools."""
    configure_logging()


@main.command("route")
@click.option("--snapshot", "snapshots", multiple=True, required=True, help="Snapshot JSONL file (repeatable).")
@click.option("--dex", "dexes", multiple=True, help="DEX name per snapshot file (repeatable).")
@click.option("--src", required=True, help="Source token.")
@click.option("--dst", required=True, help="Target token.")
@click.option("--amount", type=float, default=None, help="Input amount in source-token units.")
@click.option("--capital-usd", type=float, default=None, help="Input sized as capital / source price.")
@click.option("--prices", "prices_path", default=None, help="Price file for --capital-usd.")
@click.option("--strategy", type=click.Choice(["bfs", "random"]), default="bfs", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for --strategy random.")
@click.option("--splits", type=int, default=1, show_default=True, help="Number of equal trade splits.")
@click.option("--fee-bps", type=int, default=None, help="Override every pool's fee (basis points).")
@click.option("--max-rounds", type=int, default=64, show_default=True)
@_exit_codes
def route_cmd(snapshots, dexes, src, dst, amount, capital_usd, prices_path, strategy, seed, splits, fee_bps, max_rounds):
    """Find the best trade plan and print it as JSON."""
    pools = _load_pools(snapshots, dexes)
    eps = _resolve_amount(amount, capital_usd, prices_path, src)
    router = LineGraphRouter(
        strategy=strategy,
        seed=seed,
        splits=splits,
        fee_bps=fee_bps,
        max_rounds=max_rounds,
    ).fit(pools)
    result = router.route(src, dst, eps)
    click.echo(json.dumps(result.to_dict(), indent=2))


@main.command("dfs")
@click.option("--snapshot", "snapshots", multiple=True, required=True)
@click.option("--dex", "dexes", multiple=True)
@click.option("--src", required=True)
@click.option("--dst", required=True)
@click.option("--amount", type=float, required=True)
@click.option("--max-hops", type=int, default=3, show_default=True)
@click.option("--fee-bps", type=int, default=None)
@_exit_codes
def dfs_cmd(snapshots, dexes, src, dst, amount, max_hops, fee_bps):
    """Depth-first-search baseline route, printed as JSON."""
    pools = _load_pools(snapshots, dexes)
    router = DfsRouter(max_hops=max_hops, fee_bps=fee_bps).fit(pools)
    result = router.route(src, dst, amount)
    click.echo(json.dumps(result.to_dict(), indent=2))


@main.group("bench")
def bench_group():
    """Benchmark experiments driven by a JSON config."""


@bench_group.command("ratio")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "outdir", required=True, type=click.Path())
@_exit_codes
def bench_ratio_cmd(config_path, outdir):
    """Profitability-ratio CDF between two methods."""
    cfg = ExperimentConfig.from_json_file(config_path)
    result = run_ratio_experiment(cfg)
    paths = write_ratio_outputs(result, outdir)
    click.echo(
        json.dumps(
            {
                "records": result.manifest["n_pairs_recorded"],
                "excluded": result.manifest["n_pairs_excluded"],
                "outputs": {k: str(v) for k, v in paths.items()},
            },
            indent=2,
        )
    )


@bench_group.command("scaling")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "outdir", required=True, type=click.Path())
@_exit_codes
def bench_scaling_cmd(config_path, outdir):
    """Rounds, links, and runtime versus token-graph size."""
    cfg = ExperimentConfig.from_json_file(config_path)
    result = run_scaling_experiment(cfg)
    paths = write_scaling_outputs(result, outdir)
    click.echo(
        json.dumps(
            {"fits": result.fits, "outputs": {k: str(v) for k, v in paths.items()}},
            indent=2,
        )
    )


@main.group("graph")
def graph_group():
    """Graph inspection utilities."""


@graph_group.command("stats")
@click.option("--snapshot", "snapshots", multiple=True, required=True)
@click.option("--dex", "dexes", multiple=True)
@click.option("--fee-bps", type=int, default=None)
@_exit_codes
def graph_stats_cmd(snapshots, dexes, fee_bps):
    """Token-graph and line-graph statistics as JSON."""
    from dataclasses import replace

    pools = _load_pools(snapshots, dexes)
    if fee_bps is not None:
        pools = [replace(p, fee_bps=fee_bps) for p in pools]
    pools = filter_pools(pools, FilterPolicy())
    by_dex = sorted({p.dex for p in pools})
    graphs = {dex: build_graph([p for p in pools if p.dex == dex]) for dex in by_dex}
    stats = {dex: line_graph_stats(g, "pool") for dex, g in graphs.items()}
    payload = {"per_dex": stats}
    if len(graphs) > 1:
        merged = merge_graphs(list(graphs.values()))
        payload["aggregator"] = line_graph_stats(merged, "pair")
    click.echo(json.dumps(payload, indent=2))


if __name__ == "__main__":
    main()
