"""Line graph of the token graph: vertices are directed pool edges,
links connect composable trades.

A link runs from vertex u to vertex w when u's output token is w's
input token, minus a backtrack cut.  Two cut policies exist:

* ``"pool"`` — only the exact reverse direction of the *same* pool is
  cut.  This is the narrowest cut that keeps the closed-form link count
  sum(d_i^2) - 2*n_pools exact on any multigraph, and it retains
  cross-pool round trips such as (A,B)@dex1 -> (B,A)@dex2.
* ``"pair"`` — every reversal of the same *token pair* is cut,
  regardless of which pool carries it.  Under this policy an aggregator
  of n structurally identical DEXs has exactly n^2 times the links of
  one copy.

Single-DEX construction defaults to "pool"; the aggregator build
defaults to "pair" (the two coincide when no parallel pools exist).

The topology (vertices, links, twins) is immutable and cached per token
graph; per-query state (source wiring, working reserves) lives on the
LineGraph handle, so many queries can share one topology concurrently.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import ConfigError, InsolvencyError, UnknownTokenError
from .marketdata import TokenId
from .tokengraph import TokenGraph, degree_profile, merge_graphs

logger = logging.getLogger("amm_pathfinder.linegraph")

BACKTRACK_CUTS = ("pool", "pair")


@dataclass
class LineGraphTopology:
    """Source-independent part of a line graph, built once per token graph."""

    graph: TokenGraph
    vertices: tuple  # tuple[DirectedPool]; vertex id = index
    links: list  # list[(from_id, to_id)], sorted
    out_by_vertex: list  # list[list[int]]
    twin: list  # reverse-direction vertex of the same pool
    by_token_in: dict
    vertex_by_key: dict  # (pool_ref, token_in) -> id
    backtrack_cut: str

    @property
    def tokens(self):
        return self.graph.tokens

    def with_source(self, source_token: TokenId) -> "LineGraph":
        """Attach the extra source vertex, which links to every vertex
        selling the source token."""
        if source_token not in self.graph.adjacency:
            raise UnknownTokenError(f"source token {source_token!r} is not in the graph")
        source_id = len(self.vertices)
        source_links = [(source_id, w) for w in self.by_token_in.get(source_token, ())]
        return LineGraph(
            topo=self,
            source_token=source_token,
            source_id=source_id,
            source_links=source_links,
            reserve_in=[v.reserve_in for v in self.vertices],
            reserve_out=[v.reserve_out for v in self.vertices],
            gamma=[v.gamma for v in self.vertices],
        )


@dataclass
class LineGraph:
    """A routed view of a topology: source wiring plus working reserves.

    Reserves start at the snapshot values; route splitting mutates them
    on a private clone (see ``clone_working``), never on a shared
    instance.
    """

    topo: LineGraphTopology
    source_token: TokenId
    source_id: int
    source_links: list
    reserve_in: list
    reserve_out: list
    gamma: list

    @property
    def vertices(self):
        return self.topo.vertices

    @property
    def links(self):
        return self.topo.links

    def all_links(self) -> list:
        """Every link including the source vertex's, in (from, to) order.

        The source id exceeds all vertex ids, so appending its links
        keeps the list globally sorted.
        """
        return self.topo.links + self.source_links

    def out_neighbors(self, vertex_id: int) -> list:
        if vertex_id == self.source_id:
            return [w for _, w in self.source_links]
        return self.topo.out_by_vertex[vertex_id]

    def clone_working(self) -> "LineGraph":
        return LineGraph(
            topo=self.topo,
            source_token=self.source_token,
            source_id=self.source_id,
            source_links=self.source_links,
            reserve_in=list(self.reserve_in),
            reserve_out=list(self.reserve_out),
            gamma=self.gamma,
        )

    def apply_hop(self, vertex_id: int, amount_in: float, amount_out: float) -> None:
        """Execute a swap on vertex ``vertex_id``'s pool, updating both
        trade directions of that pool."""
        if amount_out >= self.reserve_out[vertex_id]:
            pool = self.vertices[vertex_id]
            raise InsolvencyError(
                f"cannot take {amount_out} out of pool {pool.pool_ref} "
                f"holding only {self.reserve_out[vertex_id]} {pool.token_out}"
            )
        new_in = self.reserve_in[vertex_id] + amount_in
        new_out = self.reserve_out[vertex_id] - amount_out
        self.reserve_in[vertex_id] = new_in
        self.reserve_out[vertex_id] = new_out
        other = self.topo.twin[vertex_id]
        self.reserve_in[other] = new_out
        self.reserve_out[other] = new_in

    def directed_pool_at(self, vertex_id: int):
        """The vertex's pool with this view's current working reserves."""
        from dataclasses import replace

        return replace(
            self.vertices[vertex_id],
            reserve_in=self.reserve_in[vertex_id],
            reserve_out=self.reserve_out[vertex_id],
        )


def _build_topology(g: TokenGraph, backtrack_cut: str) -> LineGraphTopology:
    if backtrack_cut not in BACKTRACK_CUTS:
        raise ConfigError(f"backtrack_cut must be one of {BACKTRACK_CUTS}, got {backtrack_cut!r}")
    vertices = g.edges  # already sorted by (token_in, token_out, dex, pool_ref)
    by_token_in: dict[str, list[int]] = {}
    for idx, edge in enumerate(vertices):
        by_token_in.setdefault(edge.token_in, []).append(idx)

    twin = [-1] * len(vertices)
    vertex_by_key = {(e.pool_ref, e.token_in): i for i, e in enumerate(vertices)}
    for idx, edge in enumerate(vertices):
        twin[idx] = vertex_by_key[(edge.pool_ref, edge.token_out)]

    links = []
    out_by_vertex: list[list[int]] = [[] for _ in vertices]
    for u, edge in enumerate(vertices):
        for w in by_token_in.get(edge.token_out, ()):
            succ = vertices[w]
            if backtrack_cut == "pool":
                if succ.pool_ref == edge.pool_ref:
                    continue
            else:  # pair: cut every reversal of the same token pair
                if succ.token_in == edge.token_out and succ.token_out == edge.token_in:
                    continue
            links.append((u, w))
            out_by_vertex[u].append(w)
    # iteration order above is already (from, to) sorted

    return LineGraphTopology(
        graph=g,
        vertices=vertices,
        links=links,
        out_by_vertex=out_by_vertex,
        twin=twin,
        by_token_in=by_token_in,
        vertex_by_key=vertex_by_key,
        backtrack_cut=backtrack_cut,
    )


def line_graph_topology(g: TokenGraph, backtrack_cut: str = "pool") -> LineGraphTopology:
    """Build (or fetch the cached) source-independent line-graph topology."""
    topo = g._lg_topo_cache.get(backtrack_cut)
    if topo is None:
        topo = _build_topology(g, backtrack_cut)
        g._lg_topo_cache[backtrack_cut] = topo
        logger.debug(
            "built line graph: %d vertices, %d links (cut=%s)",
            len(topo.vertices),
            len(topo.links),
            backtrack_cut,
        )
    return topo


def build_line_graph(g: TokenGraph, source: TokenId, backtrack_cut: str = "pool") -> LineGraph:
    """Line graph of a single token graph, wired for one source token."""
    return line_graph_topology(g, backtrack_cut).with_source(source)


def build_aggregator_line_graph(
    graphs: list[TokenGraph],
    source: TokenId,
    backtrack_cut: str = "pair",
    allow_partial_overlap: bool = False,
) -> LineGraph:
    """Integrated line graph over several per-DEX token graphs.

    Vertices are the union of all DEXs' directed edges and links connect
    composable vertices across every DEX combination.  By default every
    token of each later graph must already exist in the first graph;
    pass ``allow_partial_overlap=True`` to lift that check.
    """
    if not graphs:
        raise ConfigError("aggregator requires at least one token graph")
    base_tokens = set(graphs[0].tokens)
    for k, g in enumerate(graphs[1:], start=2):
        missing = sorted(set(g.tokens) - base_tokens)
        if missing and not allow_partial_overlap:
            raise ConfigError(
                f"graph {k} has tokens absent from graph 1 ({missing[:5]}...); "
                "pass allow_partial_overlap=True to integrate anyway"
            )
    merged = graphs[0] if len(graphs) == 1 else merge_graphs(graphs)
    return build_line_graph(merged, source, backtrack_cut=backtrack_cut)


def line_graph_stats(g: TokenGraph, backtrack_cut: str = "pool") -> dict:
    """Vertex/link counts and token-degree histogram, for dumps and plots."""
    topo = line_graph_topology(g, backtrack_cut)
    degrees = degree_profile(g)
    histogram: dict[int, int] = {}
    for d in degrees.values():
        histogram[d] = histogram.get(d, 0) + 1
    return {
        "tokens": len(g.tokens),
        "pools": g.n_pools,
        "directed_edges": len(g.edges),
        "line_graph_vertices": len(topo.vertices),
        "line_graph_links": len(topo.links),
        "backtrack_cut": backtrack_cut,
        "degree_histogram": {str(k): v for k, v in sorted(histogram.items())},
    }
