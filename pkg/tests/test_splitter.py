"""Route splitting and plan merging.

The two-path improvement case is checked against a brute-force oracle
that enumerates every per-part path assignment with sequential reserve
updates.
"""

import itertools

import pytest

from amm_pathfinder.errors import ConfigError, SplitNoRouteError
from amm_pathfinder.fixtures import load_fixture
from amm_pathfinder.linegraph import build_line_graph
from amm_pathfinder.marketdata import PoolSnapshot
from amm_pathfinder.router import BfsOrder, extract_result, route
from amm_pathfinder.splitter import merge_plans, split_route
from amm_pathfinder.tokengraph import build_graph

from conftest import priced_graph


def fixture_lg(name, source, fee_bps=None):
    pools = list(load_fixture(name).pools)
    if fee_bps is not None:
        pools = [PoolSnapshot(p.dex, p.token0, p.token1, p.reserve0, p.reserve1, fee_bps) for p in pools]
    g = build_graph(pools)
    return g, build_line_graph(g, source)


def enumerate_simple_pool_paths(g, source, target, max_hops):
    paths = []

    def walk(token, path, visited):
        for edge in g.adjacency[token]:
            if edge.token_out in visited:
                continue
            if edge.token_out == target:
                paths.append(path + (edge,))
            elif len(path) + 1 < max_hops:
                walk(edge.token_out, path + (edge,), visited | {edge.token_out})

    walk(source, (), {source})
    return paths


def replay_assignment(assignment, part_in):
    """Sequentially execute one path per part against shared reserves."""
    reserves = {}
    total = 0.0
    for path in assignment:
        amount = part_in
        for edge in path:
            state = reserves.setdefault(
                edge.pool_ref,
                {edge.token_in: edge.reserve_in, edge.token_out: edge.reserve_out},
            )
            effective = (1.0 - edge.fee_bps / 10_000.0) * amount
            out = state[edge.token_out] * effective / (state[edge.token_in] + effective)
            state[edge.token_in] += amount
            state[edge.token_out] -= out
            amount = out
        total += amount
    return total


def best_split_assignment(g, source, target, eps, k, max_hops=2):
    paths = enumerate_simple_pool_paths(g, source, target, max_hops)
    return max(
        replay_assignment(assignment, eps / k)
        for assignment in itertools.product(paths, repeat=k)
    )


class TestSplitRoute:
    def test_k1_bitwise_equals_plain_route(self):
        _, lg = fixture_lg("two_path", "A")
        plain = extract_result(route(lg, 100.0, BfsOrder()), "C")
        split = split_route(lg, 100.0, 1, "C", BfsOrder())
        assert split.total_out == plain.amount_out
        assert split.merged_plan.to_records() == plain.plan.to_records()

    def test_same_pool_split_exact_values(self):
        """Part-by-part x*y=k algebra: 5 -> 4.7619..., then 5 against the
        moved reserves -> 4.3290...; the sum equals the unsplit swap."""
        _, lg = fixture_lg("single_pool", "A")
        result = split_route(lg, 10.0, 2, "B", BfsOrder())
        assert result.parts[0].amount_out == pytest.approx(100.0 * 5.0 / 105.0, rel=1e-12)
        assert result.parts[1].amount_out == pytest.approx(
            (100.0 - 100.0 * 5.0 / 105.0) * 5.0 / 110.0, rel=1e-12
        )
        unsplit = 100.0 * 10.0 / 110.0
        assert result.total_out == pytest.approx(unsplit, rel=1e-9)

    def test_same_pool_split_coalesces_to_one_hop(self):
        _, lg = fixture_lg("single_pool", "A")
        result = split_route(lg, 10.0, 2, "B", BfsOrder())
        assert len(result.merged_plan) == 1
        hop = result.merged_plan.hops[0]
        assert hop.amount_in == 10.0
        assert hop.amount_out == pytest.approx(100.0 * 10.0 / 110.0, rel=1e-12)
        assert hop.parts == (0, 1)

    def test_same_pool_split_with_fee_stays_split(self):
        """With a fee, one merged swap pays less than two sequential
        halves, so coalescing is not replay-neutral and must not happen."""
        _, lg = fixture_lg("single_pool", "A", fee_bps=30)
        result = split_route(lg, 10.0, 2, "B", BfsOrder())
        assert len(result.merged_plan) == 2
        _, realized = result.merged_plan.replay()
        assert realized == pytest.approx(result.total_out, rel=1e-9)

    def test_two_path_split_beats_unsplit_and_matches_assignment_oracle(self):
        """Trade sized at 10% of path depth: part 1 degrades the deep
        route enough that part 2 switches to the alternative."""
        g, lg = fixture_lg("two_path", "A")
        k1 = split_route(lg, 100.0, 1, "C", BfsOrder())
        k2 = split_route(lg, 100.0, 2, "C", BfsOrder())
        assert k2.total_out > k1.total_out
        part_paths = [tuple(h.pool.pool_ref for h in p.plan.hops) for p in k2.parts]
        assert part_paths[0] != part_paths[1]
        oracle = best_split_assignment(g, "A", "C", 100.0, 2)
        assert k2.total_out == pytest.approx(oracle, rel=1e-12)
        assert k2.total_out >= k1.total_out

    def test_two_path_no_cross_pool_coalescing(self):
        _, lg = fixture_lg("two_path", "A")
        result = split_route(lg, 100.0, 2, "C", BfsOrder())
        assert len(result.merged_plan) == 4

    def test_sum_consistency_on_random_fixtures(self):
        for seed in range(4):
            g = priced_graph(seed, n_tokens=8, n_pools=12)
            lg = build_line_graph(g, g.tokens[0])
            for k in (1, 2, 4, 8):
                result = split_route(lg, 200.0, k, g.tokens[-1], BfsOrder())
                assert result.total_out == pytest.approx(
                    sum(p.amount_out for p in result.parts), rel=1e-12
                )
                _, realized = result.merged_plan.replay()
                assert realized == pytest.approx(result.total_out, rel=1e-9)

    def test_shared_line_graph_not_mutated(self):
        _, lg = fixture_lg("single_pool", "A")
        before = list(lg.reserve_in)
        split_route(lg, 10.0, 4, "B", BfsOrder())
        assert lg.reserve_in == before

    def test_no_route_carries_completed_parts(self):
        pools = [
            PoolSnapshot("d", "A", "B", 100.0, 100.0, 0),
            PoolSnapshot("d", "C", "D", 100.0, 100.0, 0),
        ]
        g = build_graph(pools)
        lg = build_line_graph(g, "A")
        with pytest.raises(SplitNoRouteError) as exc:
            split_route(lg, 10.0, 2, "D", BfsOrder())
        assert exc.value.parts == []

    def test_invalid_k(self):
        _, lg = fixture_lg("single_pool", "A")
        with pytest.raises(ConfigError):
            split_route(lg, 10.0, 0, "B")

    def test_aggregator_flag_recorded(self):
        _, lg = fixture_lg("single_pool", "A")
        assert split_route(lg, 1.0, 1, "B", aggregator=True).aggregator


class TestMergePlans:
    def test_single_part_identity(self):
        _, lg = fixture_lg("two_path", "A")
        result = extract_result(route(lg, 100.0, BfsOrder()), "C")
        merged = merge_plans([result])
        assert merged.to_records() == result.plan.to_records()

    def test_empty_parts_rejected(self):
        with pytest.raises(ConfigError):
            merge_plans([])

    def test_merged_plan_tags_parts_in_execution_order(self):
        _, lg = fixture_lg("two_path", "A")
        result = split_route(lg, 100.0, 2, "C", BfsOrder())
        seen = [p for hop in result.merged_plan.hops for p in hop.parts]
        assert seen == sorted(seen)
