"""Fixed-point relaxation over the line graph, plus a DFS baseline.

Every line-graph vertex stores the best obtained amount of its output
token and the path from the source vertex that produced it.  One round
relaxes every link once, in an order chosen by the iteration strategy:

* ``RandomOrder(seed)`` reshuffles the full link list each round with a
  seeded generator (same seed, same results, bit for bit).
* ``BfsOrder()`` uses a fixed order that visits links in breadth-first
  layers from the source vertex, so by the time a link is relaxed its
  tail vertex has had a chance to hold a nonzero amount.

Rounds repeat until a full round makes no update or ``max_rounds`` is
hit (then the result is flagged truncated, never silently clipped).
Relaxation evaluates every hop against the line graph's current
reserves without intra-path updates, so on graphs containing profitable
cycles the fixed point corresponds to pool-revisiting walks whose
executable value is lower than the relaxed amount; quiesced runs on
arbitrage-free graphs reproduce their paths exactly under replay.
"""

from __future__ import annotations

import logging
import random
import time
from collections import deque
from dataclasses import dataclass, replace

from .amm import swap_out
from .errors import NoRouteError, UnknownTokenError
from .linegraph import LineGraph
from .marketdata import TokenId
from .plan import PlanHop, TradePlan
from .tokengraph import TokenGraph

logger = logging.getLogger("amm_pathfinder.router")


@dataclass(frozen=True)
class ConvergenceConfig:
    """Stopping rule for the relaxation.

    The exact "no increase" rule does not terminate in floating point
    when profitable cycles shrink their increments forever, so updates
    must beat the current best by a relative floor, and rounds are
    capped.
    """

    min_rel_improvement: float = 1e-12
    max_rounds: int = 64


DEFAULT_CONFIG = ConvergenceConfig()


@dataclass(frozen=True)
class RandomOrder:
    seed: int = 0


@dataclass(frozen=True)
class BfsOrder:
    pass


@dataclass
class RouteState:
    """Per-vertex relaxation outcome for one (source, amount) query."""

    lg: LineGraph
    amount_in: float
    best: list  # best obtained amount per vertex id (source last)
    paths: list  # tuple of vertex ids from the source vertex, or None
    rounds: int
    truncated: bool
    elapsed_s: float


@dataclass(frozen=True)
class RouteResult:
    source: TokenId
    target: TokenId
    amount_in: float
    amount_out: float
    plan: TradePlan
    rounds: int
    elapsed_s: float
    truncated: bool
    vertex_id: int

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "amount_in": self.amount_in,
            "amount_out": self.amount_out,
            "rounds": self.rounds,
            "elapsed_s": self.elapsed_s,
            "truncated": self.truncated,
            "plan": self.plan.to_records(),
        }


def bfs_link_order(lg: LineGraph) -> list:
    """Link iteration order in breadth-first layers from the source vertex.

    Each link appears exactly once; links whose tail is unreachable from
    the source are appended last in (from, to) order.
    """
    order = []
    visited = {lg.source_id}
    queue = deque([lg.source_id])
    while queue:
        q = queue.popleft()
        for w in lg.out_neighbors(q):
            order.append((q, w))
            if w not in visited:
                visited.add(w)
                queue.append(w)
    if len(order) != len(lg.topo.links) + len(lg.source_links):
        order.extend(sorted(link for link in lg.topo.links if link[0] not in visited))
    return order


def route(
    lg: LineGraph,
    amount_in: float,
    order=BfsOrder(),
    cfg: ConvergenceConfig = DEFAULT_CONFIG,
) -> RouteState:
    """Relax the line graph to a fixed point for ``amount_in`` source tokens.

    Answers every target at once; use ``extract_result`` to pick one.
    The line graph is not mutated, so concurrent queries may share it.
    """
    if amount_in <= 0:
        raise ValueError(f"amount_in must be > 0, got {amount_in}")

    if isinstance(order, BfsOrder):
        sweep = bfs_link_order(lg)
        rng = None
    elif isinstance(order, RandomOrder):
        sweep = lg.all_links()
        rng = random.Random(order.seed)
    else:
        raise TypeError(f"unsupported iteration order: {order!r}")

    n = len(lg.vertices)
    src = lg.source_id
    best = [0.0] * (n + 1)
    best[src] = amount_in
    paths: list = [None] * (n + 1)
    paths[src] = (src,)
    reserve_in = lg.reserve_in
    reserve_out = lg.reserve_out
    gamma = lg.gamma
    floor = 1.0 + cfg.min_rel_improvement

    rounds = 0
    truncated = True
    start = time.perf_counter()
    for _ in range(cfg.max_rounds):
        rounds += 1
        if rng is not None:
            rng.shuffle(sweep)
        updated = False
        for u, w in sweep:
            amount = best[u]
            if amount <= 0.0:
                continue
            effective = gamma[w] * amount
            out = reserve_out[w] * effective / (reserve_in[w] + effective)
            if out > best[w] * floor:
                assert out > best[w]  # relaxation is monotone by construction
                best[w] = out
                paths[w] = paths[u] + (w,)
                updated = True
        if not updated:
            truncated = False
            break
    elapsed = time.perf_counter() - start
    if truncated:
        logger.info(
            "relaxation truncated after %d rounds (source=%s, amount=%g)",
            rounds,
            lg.source_token,
            amount_in,
        )
    return RouteState(
        lg=lg,
        amount_in=amount_in,
        best=best,
        paths=paths,
        rounds=rounds,
        truncated=truncated,
        elapsed_s=elapsed,
    )


def _materialize_plan(state: RouteState, vertex_id: int, part: int = 0) -> TradePlan:
    """Replay the winning path hop by hop with sequential reserve updates."""
    lg = state.lg
    path = state.paths[vertex_id]
    reserves: dict[str, dict[str, float]] = {}
    hops = []
    amount = state.amount_in
    pool_vertices = path[1:]  # skip the source vertex
    for i, v in enumerate(pool_vertices):
        pool = lg.directed_pool_at(v)
        ref = pool.pool_ref
        st = reserves.get(ref)
        if st is None:
            st = {pool.token_in: pool.reserve_in, pool.token_out: pool.reserve_out}
            reserves[ref] = st
        live = replace(pool, reserve_in=st[pool.token_in], reserve_out=st[pool.token_out])
        out = swap_out(live, amount)
        st[pool.token_in] += amount
        st[pool.token_out] -= out
        hops.append(
            PlanHop(
                pool=pool,
                amount_in=amount,
                amount_out=out,
                parts=(part,),
                terminal=(i == len(pool_vertices) - 1),
            )
        )
        amount = out
    return TradePlan(hops=tuple(hops))


def extract_result(state: RouteState, target: TokenId, part: int = 0) -> RouteResult:
    """Pick the best vertex delivering ``target`` and materialize its plan.

    Ties are broken by shorter path, then by the lexicographically
    smallest path of vertex ids.
    """
    lg = state.lg
    candidates = [
        v
        for v, edge in enumerate(lg.vertices)
        if edge.token_out == target and state.best[v] > 0.0
    ]
    if not candidates:
        if not any(edge.token_out == target for edge in lg.vertices):
            raise UnknownTokenError(f"no pool delivers token {target!r}")
        raise NoRouteError(
            f"no route from {state.lg.source_token!r} to {target!r} "
            f"for input {state.amount_in}"
        )
    winner = min(candidates, key=lambda v: (-state.best[v], len(state.paths[v]), state.paths[v]))
    plan = _materialize_plan(state, winner, part=part)
    return RouteResult(
        source=lg.source_token,
        target=target,
        amount_in=state.amount_in,
        amount_out=state.best[winner],
        plan=plan,
        rounds=state.rounds,
        elapsed_s=state.elapsed_s,
        truncated=state.truncated,
        vertex_id=winner,
    )


def dfs_route(
    g: TokenGraph,
    source: TokenId,
    target: TokenId,
    amount_in: float,
    max_hops: int = 3,
) -> RouteResult:
    """Baseline: best simple token path (no repeated token) within a hop bound.

    Enumerates every simple path from source to target with at most
    ``max_hops`` pool hops, evaluates each by sequential swaps, and
    returns the most profitable one.  Deterministic given the graph.
    """
    if max_hops < 1:
        raise ValueError(f"max_hops must be >= 1, got {max_hops}")
    if amount_in <= 0:
        raise ValueError(f"amount_in must be > 0, got {amount_in}")
    if source == target:
        raise NoRouteError("the DFS baseline trades distinct tokens (source == target)")
    for token in (source, target):
        if token not in g.adjacency:
            raise UnknownTokenError(f"token {token!r} is not in the graph")

    best_amount = 0.0
    best_hops: tuple = ()
    start = time.perf_counter()

    def explore(token, amount, visited, hops):
        nonlocal best_amount, best_hops
        for edge in g.adjacency[token]:
            nxt = edge.token_out
            if nxt in visited:
                continue
            out = swap_out(edge, amount)
            if nxt == target:
                if out > best_amount:
                    best_amount = out
                    best_hops = hops + ((edge, amount, out),)
                continue
            if len(hops) + 1 < max_hops:
                explore(nxt, out, visited | {nxt}, hops + ((edge, amount, out),))

    explore(source, amount_in, {source}, ())
    elapsed = time.perf_counter() - start
    if best_amount <= 0.0:
        raise NoRouteError(
            f"no simple path from {source!r} to {target!r} within {max_hops} hops"
        )
    hops = tuple(
        PlanHop(
            pool=edge,
            amount_in=amt_in,
            amount_out=amt_out,
            parts=(0,),
            terminal=(i == len(best_hops) - 1),
        )
        for i, (edge, amt_in, amt_out) in enumerate(best_hops)
    )
    return RouteResult(
        source=source,
        target=target,
        amount_in=amount_in,
        amount_out=best_amount,
        plan=TradePlan(hops=hops),
        rounds=0,
        elapsed_s=elapsed,
        truncated=False,
        vertex_id=-1,
    )
