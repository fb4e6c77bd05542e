"""Directed token graph built from filtered pool snapshots.

Tokens are vertices; every pool contributes two directed edges (one per
trade direction).  Pools between the same token pair on different DEXs
(or distinct pools on one DEX) coexist as parallel edges.  The built
graph is immutable and shareable across threads; reserve mutation during
route splitting happens on per-query working copies of the line graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .amm import DirectedPool
from .errors import ConfigError
from .marketdata import PoolSnapshot, TokenId


@dataclass
class TokenGraph:
    tokens: tuple[TokenId, ...]
    edges: tuple[DirectedPool, ...]
    adjacency: dict[TokenId, tuple[DirectedPool, ...]]
    n_pools: int
    # line-graph topology memo, keyed by backtrack-cut mode (see linegraph.py)
    _lg_topo_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def out_edges(self, token: TokenId) -> tuple[DirectedPool, ...]:
        return self.adjacency.get(token, ())


def pool_ref(pool: PoolSnapshot) -> str:
    return f"{pool.dex}:{pool.token0}/{pool.token1}"


def build_graph(pools: list[PoolSnapshot]) -> TokenGraph:
    """Expand filtered pools into the directed token graph.

    Expects filtered input: positive reserves and unique
    (dex, token0, token1) keys (run marketdata.filter_pools first).
    """
    edges = []
    seen_refs = set()
    for pool in pools:
        if pool.reserve0 <= 0 or pool.reserve1 <= 0:
            raise ConfigError(f"pool {pool.key} has non-positive reserves; filter pools first")
        ref = pool_ref(pool)
        if ref in seen_refs:
            raise ConfigError(f"duplicate pool {ref}; filter pools first")
        seen_refs.add(ref)
        edges.append(
            DirectedPool(
                pool_ref=ref,
                dex=pool.dex,
                token_in=pool.token0,
                token_out=pool.token1,
                reserve_in=pool.reserve0,
                reserve_out=pool.reserve1,
                fee_bps=pool.fee_bps,
            )
        )
        edges.append(
            DirectedPool(
                pool_ref=ref,
                dex=pool.dex,
                token_in=pool.token1,
                token_out=pool.token0,
                reserve_in=pool.reserve1,
                reserve_out=pool.reserve0,
                fee_bps=pool.fee_bps,
            )
        )

    edges.sort(key=lambda e: e.sort_key)
    tokens = tuple(sorted({e.token_in for e in edges}))
    adjacency: dict[str, list[DirectedPool]] = {t: [] for t in tokens}
    for edge in edges:
        adjacency[edge.token_in].append(edge)
    return TokenGraph(
        tokens=tokens,
        edges=tuple(edges),
        adjacency={t: tuple(out) for t, out in adjacency.items()},
        n_pools=len(pools),
    )


def merge_graphs(graphs: list[TokenGraph]) -> TokenGraph:
    """Union several per-DEX graphs into one multigraph (aggregator view)."""
    if not graphs:
        raise ConfigError("merge_graphs requires at least one graph")
    edges = [e for g in graphs for e in g.edges]
    refs = [e.pool_ref for e in edges]
    if len(set(refs)) != len(refs) // 2:
        # each ref must appear exactly twice (its two directions)
        raise ConfigError("overlapping pool_refs across graphs; use distinct dex tags")
    edges.sort(key=lambda e: e.sort_key)
    tokens = tuple(sorted({e.token_in for e in edges}))
    adjacency: dict[str, list[DirectedPool]] = {t: [] for t in tokens}
    for edge in edges:
        adjacency[edge.token_in].append(edge)
    return TokenGraph(
        tokens=tokens,
        edges=tuple(edges),
        adjacency={t: tuple(out) for t, out in adjacency.items()},
        n_pools=sum(g.n_pools for g in graphs),
    )


def degree_profile(g: TokenGraph) -> dict[TokenId, int]:
    """Undirected degree of each token: distinct pool incidences.

    Parallel pools count separately, so sum(degrees) == 2 * n_pools.
    Because every pool is expanded bidirectionally, a token's degree
    equals its directed out-degree.
    """
    return {token: len(g.adjacency[token]) for token in g.tokens}


def graph_to_dict(g: TokenGraph) -> dict:
    """JSON-friendly dump used for debugging and golden tests."""
    return {
        "tokens": list(g.tokens),
        "edges": [
            {
                "in": e.token_in,
                "out": e.token_out,
                "dex": e.dex,
                "reserve_in": e.reserve_in,
                "reserve_out": e.reserve_out,
                "fee_bps": e.fee_bps,
            }
            for e in g.edges
        ],
    }
