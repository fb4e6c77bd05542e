"""Shared test helpers.

Quiescence-friendly synthetic graphs: the "priced" reserve model with
noise below half the fee margin makes every cycle strictly lossy, so
relaxation runs are guaranteed to quiesce and comparisons between
iteration strategies are well-posed.
"""

from __future__ import annotations

import random
from collections import deque

import pytest

from amm_pathfinder import ReserveSpec, build_graph, gen_synthetic_graph
from amm_pathfinder.tokengraph import TokenGraph

# 2*noise < fee margin (30 bps): no marginal-price arbitrage possible
PRICED_QUIESCENT = ReserveSpec(
    kind="priced",
    depth_min=1e4,
    depth_max=1e6,
    price_min=0.1,
    price_max=10.0,
    noise=1e-3,
)

# For oracle-equality tests: deep pools, near-unit prices, tiny noise, so
# shorter paths always dominate and hop-bounded oracles are exact.
PRICED_SHORTEST_WINS = ReserveSpec(
    kind="priced",
    depth_min=1e5,
    depth_max=1e6,
    price_min=0.5,
    price_max=2.0,
    noise=1e-4,
)


def priced_pools(seed, n_tokens=12, n_pools=18, fee_bps=30, reserves=PRICED_QUIESCENT):
    return gen_synthetic_graph(n_tokens, n_pools, seed, reserves=reserves, fee_bps=fee_bps)


def priced_graph(seed, **kwargs) -> TokenGraph:
    return build_graph(priced_pools(seed, **kwargs))


def hop_diameter(g: TokenGraph) -> int:
    """Largest pool-hop distance between any two tokens (graph is connected)."""
    worst = 0
    for start in g.tokens:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            tok = queue.popleft()
            for edge in g.adjacency[tok]:
                if edge.token_out not in dist:
                    dist[edge.token_out] = dist[tok] + 1
                    queue.append(edge.token_out)
        worst = max(worst, max(dist.values()))
    return worst


@pytest.fixture
def rng():
    return random.Random(20240811)
