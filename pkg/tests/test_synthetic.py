"""Synthetic graph generation: connectivity, determinism, reserve models."""

from collections import deque

import pytest

from amm_pathfinder.errors import ConfigError
from amm_pathfinder.fixtures import has_profitable_cycle
from amm_pathfinder.synthetic import ReserveSpec, clone_pools_for_dex, gen_synthetic_graph
from amm_pathfinder.tokengraph import build_graph

from conftest import PRICED_QUIESCENT


def is_connected(pools):
    adjacency = {}
    for p in pools:
        adjacency.setdefault(p.token0, set()).add(p.token1)
        adjacency.setdefault(p.token1, set()).add(p.token0)
    start = next(iter(adjacency))
    seen = {start}
    queue = deque([start])
    while queue:
        for nxt in adjacency[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(adjacency)


class TestTopology:
    def test_tree_case(self):
        pools = gen_synthetic_graph(4, 3, seed=1)
        g = build_graph(pools)
        assert len(g.edges) == 6
        assert is_connected(pools)

    def test_paper_scale_edge_count(self):
        """About one hundred tokens and four hundred directed edges."""
        pools = gen_synthetic_graph(100, 200, seed=7)
        assert len(build_graph(pools).edges) == 400

    def test_deterministic_per_seed(self):
        assert gen_synthetic_graph(20, 35, seed=9) == gen_synthetic_graph(20, 35, seed=9)
        assert gen_synthetic_graph(20, 35, seed=9) != gen_synthetic_graph(20, 35, seed=10)

    def test_connected_for_many_seeds(self):
        for seed in range(20):
            assert is_connected(gen_synthetic_graph(12, 16, seed=seed))

    def test_no_duplicate_pairs(self):
        pools = gen_synthetic_graph(10, 30, seed=3)
        pairs = {tuple(sorted((p.token0, p.token1))) for p in pools}
        assert len(pairs) == len(pools) == 30

    def test_infeasible_configs_rejected(self):
        with pytest.raises(ConfigError):
            gen_synthetic_graph(5, 3, seed=0)  # cannot connect 5 tokens
        with pytest.raises(ConfigError):
            gen_synthetic_graph(4, 7, seed=0)  # only C(4,2)=6 pairs exist
        with pytest.raises(ConfigError):
            gen_synthetic_graph(1, 0, seed=0)


class TestReserveModels:
    def test_loguniform_bounds(self):
        spec = ReserveSpec(kind="loguniform", min_reserve=10.0, max_reserve=1000.0)
        for p in gen_synthetic_graph(10, 15, seed=2, reserves=spec):
            assert 10.0 <= p.reserve0 <= 1000.0
            assert 10.0 <= p.reserve1 <= 1000.0

    def test_priced_reserves_admit_no_profitable_cycle(self):
        """Noise below the fee margin keeps every cycle strictly lossy."""
        for seed in range(10):
            pools = gen_synthetic_graph(6, 9, seed=seed, reserves=PRICED_QUIESCENT, fee_bps=30)
            assert not has_profitable_cycle(build_graph(pools))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            ReserveSpec.from_dict({"kind": "gaussian"})


class TestClonePools:
    def test_clone_preserves_topology_and_prices(self):
        base = gen_synthetic_graph(8, 12, seed=5, reserves=PRICED_QUIESCENT)
        clone = clone_pools_for_dex(base, "other", seed=6, depth_jitter=0.2)
        assert [(p.token0, p.token1) for p in clone] == [(p.token0, p.token1) for p in base]
        assert all(p.dex == "other" for p in clone)
        for a, b in zip(base, clone):
            # same-factor scaling keeps the marginal price intact
            assert b.reserve1 / b.reserve0 == pytest.approx(a.reserve1 / a.reserve0, rel=1e-12)
            assert b.reserve0 != a.reserve0
