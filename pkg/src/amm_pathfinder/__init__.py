"""Token routing for constant-product AMM DEXs via line-graph relaxation.

The package turns pool-reserve snapshots into a directed token graph,
lifts it to a line graph whose vertices are directed pools, and finds
the most profitable trade path by relaxing links to a fixed point, with
pluggable iteration orders, trade splitting, multi-DEX aggregation, a
DFS baseline, and a benchmark CLI.

Quick start::

    from amm_pathfinder import LineGraphRouter, load_snapshot

    pools = load_snapshot("pools.jsonl", dex="uniswap_v2")
    router = LineGraphRouter(strategy="bfs").fit(pools)
    result = router.route("WETH", "USDC", amount_in=2.5)
"""

from __future__ import annotations

import logging
import os

from .amm import DirectedPool, apply_swap, swap_out
from .bench import (
    ExperimentConfig,
    MethodSpec,
    RatioRecord,
    run_ratio_experiment,
    run_scaling_experiment,
)
from .errors import (
    ConfigError,
    DataError,
    InsolvencyError,
    NoRouteError,
    OracleScopeError,
    PathfinderError,
    SnapshotParseError,
    UnknownTokenError,
)
from .estimators import DfsRouter, LineGraphRouter
from .linegraph import (
    LineGraph,
    build_aggregator_line_graph,
    build_line_graph,
    line_graph_stats,
    line_graph_topology,
)
from .marketdata import (
    FilterPolicy,
    PoolSnapshot,
    dump_snapshot,
    filter_pools,
    load_prices,
    load_snapshot,
)
from .plan import PlanHop, TradePlan
from .router import (
    BfsOrder,
    ConvergenceConfig,
    RandomOrder,
    RouteResult,
    RouteState,
    bfs_link_order,
    dfs_route,
    extract_result,
    route,
)
from .splitter import SplitResult, merge_plans, split_route
from .synthetic import ReserveSpec, clone_pools_for_dex, gen_synthetic_graph
from .tokengraph import TokenGraph, build_graph, degree_profile, merge_graphs
from ._version import __version__

_LOG_LEVELS = {
    "off": logging.CRITICAL + 10,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def configure_logging(level: str | None = None) -> None:
    """Set package log verbosity, from AMM_PATHFINDER_LOG when unset."""
    name = (level or os.environ.get("AMM_PATHFINDER_LOG", "warn")).lower()
    if name not in _LOG_LEVELS:
        raise ConfigError(f"log level must be one of {sorted(_LOG_LEVELS)}, got {name!r}")
    logger = logging.getLogger("amm_pathfinder")
    logger.setLevel(_LOG_LEVELS[name])
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
