"""Scikit-learn style estimator facade over the routing engine.

``fit`` ingests pool snapshots and builds the graphs once; ``route``
answers queries against the fitted state, like the fit/query split of
``sklearn.neighbors.NearestNeighbors``.  Parameters follow sklearn
conventions (stored verbatim in ``__init__``, fitted attributes carry a
trailing underscore), so ``get_params``/``set_params``/``clone`` and
pipeline-style composition work out of the box.
"""

from __future__ import annotations

from dataclasses import replace

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import ConfigError
from .linegraph import line_graph_topology
from .marketdata import FilterPolicy, PoolSnapshot, filter_pools
from .router import BfsOrder, ConvergenceConfig, RandomOrder, extract_result, route
from .router import dfs_route as _dfs_route
from .splitter import split_route
from .tokengraph import build_graph, merge_graphs


def validate_pools(pools) -> list[PoolSnapshot]:
    """Check that the input is a non-empty sequence of PoolSnapshot records."""
    pools = list(pools)
    if not pools:
        raise ConfigError("cannot fit on an empty pool list")
    for i, pool in enumerate(pools):
        if not isinstance(pool, PoolSnapshot):
            raise TypeError(f"pools[{i}] is {type(pool).__name__}, expected PoolSnapshot")
    return pools


def _apply_fee_override(pools, fee_bps):
    if fee_bps is None:
        return pools
    if not 0 <= fee_bps < 10_000:
        raise ConfigError(f"fee_bps must be in [0, 10000), got {fee_bps}")
    return [replace(p, fee_bps=fee_bps) for p in pools]


class LineGraphRouter(BaseEstimator):
    """Line-graph relaxation router with a fit/route interface.

    Parameters
    ----------
    strategy : "bfs" or "random"
        Link iteration order for the relaxation.
    seed : int
        Seed for the "random" strategy; ignored by "bfs".
    splits : int
        Number of equal sequential sub-trades per query (1 = plain
        linear routing).
    fee_bps : int or None
        When set, overrides every pool's fee (0 for fee-free runs).
    min_rel_improvement, max_rounds
        Relaxation stopping rule; see router.ConvergenceConfig.
    backtrack_cut : "pool", "pair" or None
        Which reverse links to cut in the line graph.  None picks
        "pool" for a single DEX and "pair" when fitting several DEXs.
    """

    def __init__(
        self,
        strategy="bfs",
        seed=0,
        splits=1,
        fee_bps=None,
        min_rel_improvement=1e-12,
        max_rounds=64,
        backtrack_cut=None,
    ):
        self.strategy = strategy
        self.seed = seed
        self.splits = splits
        self.fee_bps = fee_bps
        self.min_rel_improvement = min_rel_improvement
        self.max_rounds = max_rounds
        self.backtrack_cut = backtrack_cut

    def fit(self, pools, y=None):
        """Build the token graph(s) and line-graph topology from snapshots."""
        if self.strategy not in ("bfs", "random"):
            raise ConfigError(f"strategy must be 'bfs' or 'random', got {self.strategy!r}")
        if self.splits < 1:
            raise ConfigError(f"splits must be >= 1, got {self.splits}")
        pools = _apply_fee_override(validate_pools(pools), self.fee_bps)
        pools = filter_pools(pools, FilterPolicy())
        dexes = sorted({p.dex for p in pools})
        graphs = [build_graph([p for p in pools if p.dex == dex]) for dex in dexes]
        merged = graphs[0] if len(graphs) == 1 else merge_graphs(graphs)
        cut = self.backtrack_cut or ("pool" if len(graphs) == 1 else "pair")
        self.dexes_ = dexes
        self.is_aggregator_ = len(graphs) > 1
        self.token_graph_ = merged
        self.tokens_ = merged.tokens
        self.n_pools_ = merged.n_pools
        self.topology_ = line_graph_topology(merged, cut)
        self._line_graphs = {}
        return self

    def _order(self):
        return BfsOrder() if self.strategy == "bfs" else RandomOrder(self.seed)

    def _config(self):
        return ConvergenceConfig(
            min_rel_improvement=self.min_rel_improvement,
            max_rounds=self.max_rounds,
        )

    def _line_graph(self, source):
        lg = self._line_graphs.get(source)
        if lg is None:
            lg = self.topology_.with_source(source)
            self._line_graphs[source] = lg
        return lg

    def route(self, source, target, amount_in):
        """Best trade plan for amount_in source tokens.

        Returns a RouteResult, or a SplitResult when splits > 1.
        """
        check_is_fitted(self, "topology_")
        lg = self._line_graph(source)
        if self.splits == 1:
            state = route(lg, amount_in, self._order(), self._config())
            return extract_result(state, target)
        return split_route(
            lg,
            amount_in,
            self.splits,
            target,
            self._order(),
            self._config(),
            aggregator=self.is_aggregator_,
        )

    def route_all(self, source, amount_in):
        """Relaxation state answering every target at once for one source."""
        check_is_fitted(self, "topology_")
        return route(self._line_graph(source), amount_in, self._order(), self._config())


class DfsRouter(BaseEstimator):
    """Depth-first search baseline over simple token paths.

    Mirrors the production routing used by constant-product DEX
    front ends: enumerate simple paths up to ``max_hops`` pool hops and
    take the best.
    """

    def __init__(self, max_hops=3, fee_bps=None):
        self.max_hops = max_hops
        self.fee_bps = fee_bps

    def fit(self, pools, y=None):
        if self.max_hops < 1:
            raise ConfigError(f"max_hops must be >= 1, got {self.max_hops}")
        pools = _apply_fee_override(validate_pools(pools), self.fee_bps)
        pools = filter_pools(pools, FilterPolicy())
        dexes = sorted({p.dex for p in pools})
        graphs = [build_graph([p for p in pools if p.dex == dex]) for dex in dexes]
        self.dexes_ = dexes
        self.token_graph_ = graphs[0] if len(graphs) == 1 else merge_graphs(graphs)
        self.tokens_ = self.token_graph_.tokens
        return self

    def route(self, source, target, amount_in):
        check_is_fitted(self, "token_graph_")
        return _dfs_route(self.token_graph_, source, target, amount_in, self.max_hops)
