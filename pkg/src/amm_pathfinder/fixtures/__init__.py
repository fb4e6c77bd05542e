"""Deterministic fixtures and independent brute-force oracles.

Fixture pool sets are stored in the snapshot file format under
``data/``, so every test that loads one also exercises the production
parser.  Each fixture carries hand-derived expectations; loading a
fixture re-checks every expectation against the brute-force oracle, so
a stale fixture fails loudly instead of silently anchoring tests to a
wrong value.

The oracles enumerate exhaustively and are strictly desk-scale; they
exist to be obviously correct, not fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..amm import swap_out
from ..errors import NoRouteError, OracleScopeError
from ..marketdata import PoolSnapshot, load_snapshot
from ..tokengraph import TokenGraph, build_graph

ORACLE_MAX_HOPS = 6
ORACLE_MAX_POOLS = 12


def brute_force_best_path(
    g: TokenGraph,
    source: str,
    target: str,
    amount_in: float,
    max_hops: int,
):
    """Best pool walk by exhaustive enumeration.

    Considers every pool sequence from ``source`` of up to ``max_hops``
    hops that never immediately re-crosses the pool it just used, and
    evaluates each hop against the input reserves.  Returns
    (amount_out, hops) where hops is a tuple of
    (DirectedPool, amount_in, amount_out) triples.
    """
    if max_hops > ORACLE_MAX_HOPS or g.n_pools > ORACLE_MAX_POOLS:
        raise OracleScopeError(
            f"oracle limited to {ORACLE_MAX_HOPS} hops and {ORACLE_MAX_POOLS} pools, "
            f"got max_hops={max_hops}, pools={g.n_pools}"
        )
    if source not in g.adjacency:
        raise NoRouteError(f"token {source!r} is not in the graph")

    best_amount = 0.0
    best_hops: tuple = ()

    def explore(token, amount, last_ref, hops):
        nonlocal best_amount, best_hops
        if len(hops) >= max_hops:
            return
        for edge in g.adjacency[token]:
            if edge.pool_ref == last_ref:
                continue
            out = swap_out(edge, amount)
            extended = hops + ((edge, amount, out),)
            if edge.token_out == target and out > best_amount:
                best_amount = out
                best_hops = extended
            explore(edge.token_out, out, edge.pool_ref, extended)

    explore(source, amount_in, None, ())
    if best_amount <= 0.0:
        raise NoRouteError(
            f"oracle found no walk from {source!r} to {target!r} within {max_hops} hops"
        )
    return best_amount, best_hops


def brute_force_line_graph_counts(g: TokenGraph, backtrack_cut: str = "pool"):
    """(vertex_count, link_count) by direct pair enumeration.

    Independent of the line-graph builder: scans every ordered pair of
    directed edges for composability minus the backtrack cut.
    """
    edges = g.edges
    links = 0
    for u in edges:
        for w in edges:
            if u.token_out != w.token_in:
                continue
            if backtrack_cut == "pool":
                if u.pool_ref == w.pool_ref:
                    continue
            else:
                if w.token_in == u.token_out and w.token_out == u.token_in:
                    continue
            links += 1
    return len(edges), links


def has_profitable_cycle(
    g: TokenGraph,
    probe_amount: float = 1e-6,
    max_hops: int = 4,
) -> bool:
    """Round-trip screen: does any token buy back more of itself?

    Probes with a near-marginal amount, where cycle gain is maximal
    under constant-product slippage.
    """
    for token in g.tokens:
        try:
            amount, _ = brute_force_best_path(g, token, token, probe_amount, max_hops)
        except NoRouteError:
            continue
        if amount > probe_amount:
            return True
    return False


@dataclass(frozen=True)
class Expectation:
    """One hand-derived routing fact, re-derivable by the oracle."""

    source: str
    target: str
    amount_in: float
    max_hops: int
    expected: float  # oracle output frozen at authoring time
    note: str


@dataclass(frozen=True)
class Fixture:
    name: str
    pools: tuple[PoolSnapshot, ...]
    expectations: tuple[Expectation, ...]

    def graph(self) -> TokenGraph:
        return build_graph(list(self.pools))


# Values below were produced by brute_force_best_path on the stored
# pool sets and double-checked by hand against the closed-form swap
# formula; the loader re-derives each one.
_REGISTRY = {
    "single_pool": (
        Expectation("A", "B", 10.0, 1, 9.090909090909092, "direct swap 100*10/110"),
    ),
    "path_abc": (
        Expectation("A", "C", 10.0, 2, 8.333333333333334, "two hops through equal pools"),
    ),
    "triangle": (
        Expectation("A", "C", 10.0, 1, 4.545454545454546, "direct pool quotes C at 2A"),
        Expectation("A", "C", 10.0, 3, 8.333333333333334, "two-hop route beats the direct pool"),
        Expectation(
            "A",
            "C",
            10.0,
            5,
            11.111111111111112,
            "the A/C pool misprices C, so a second lap through the cycle pays",
        ),
    ),
    "two_path": (
        Expectation("A", "C", 100.0, 2, 83.33333333333333, "deep route A-B-C"),
        Expectation("A", "C", 50.0, 2, 45.45454545454546, "half-size trade, same route"),
    ),
    "balanced_square": (
        Expectation("A", "C", 100.0, 4, 98.71580343970612, "direct hop, fee only"),
    ),
    "two_dex_pool": (
        Expectation("A", "B", 10.0, 1, 9.090909090909092, "either DEX's copy"),
    ),
}


def fixture_names() -> list[str]:
    return sorted(_REGISTRY)


def fixture_path(name: str):
    """Filesystem path of a packaged fixture file."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown fixture {name!r}; available: {fixture_names()}")
    return resources.files(__package__) / "data" / f"{name}.jsonl"


def load_fixture(name: str, verify: bool = True) -> Fixture:
    """Load a packaged fixture through the production snapshot parser.

    With ``verify=True`` every stored expectation is recomputed by the
    oracle and must match to 1e-12 relative.
    """
    path = fixture_path(name)
    pools = tuple(load_snapshot(str(path)))
    fixture = Fixture(name=name, pools=pools, expectations=_REGISTRY[name])
    if verify:
        g = fixture.graph()
        for exp in fixture.expectations:
            amount, _ = brute_force_best_path(g, exp.source, exp.target, exp.amount_in, exp.max_hops)
            if abs(amount - exp.expected) > 1e-12 * max(abs(exp.expected), 1.0):
                raise AssertionError(
                    f"fixture {name!r} expectation drifted: {exp.note}: "
                    f"oracle={amount!r}, stored={exp.expected!r}"
                )
    return fixture
