"""Route splitting: K equal sequential sub-trades with reserve updates.

A trade of size eps is divided into K parts of eps/K.  Each part is
routed on the current working reserves; its hops are then executed
against a query-private copy of the pool state before the next part is
routed.  The per-part plans are concatenated into one implementable
plan, coalescing consecutive same-pool, same-direction hops only when
that is provably replay-neutral.

The same operation serves single-DEX and aggregator line graphs; the
``aggregator`` flag only tags the result for reporting.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .errors import ConfigError, InternalConsistencyError, NoRouteError, SplitNoRouteError
from .linegraph import LineGraph
from .plan import PlanHop, TradePlan
from .router import ConvergenceConfig, DEFAULT_CONFIG, BfsOrder, RouteResult, extract_result, route

logger = logging.getLogger("amm_pathfinder.splitter")

REPLAY_REL_TOL = 1e-9


@dataclass(frozen=True)
class SplitResult:
    total_out: float
    parts: tuple[RouteResult, ...]
    merged_plan: TradePlan
    k: int
    aggregator: bool = False

    @property
    def amount_out(self) -> float:
        return self.total_out

    def to_dict(self) -> dict:
        return {
            "total_out": self.total_out,
            "k": self.k,
            "aggregator": self.aggregator,
            "part_outputs": [p.amount_out for p in self.parts],
            "rounds": [p.rounds for p in self.parts],
            "truncated": any(p.truncated for p in self.parts),
            "merged_plan": self.merged_plan.to_records(),
        }


def _retag(plan: TradePlan, part: int) -> TradePlan:
    return TradePlan(hops=tuple(replace(h, parts=(part,)) for h in plan.hops))


def split_route(
    lg: LineGraph,
    amount_in: float,
    k: int,
    target,
    order=BfsOrder(),
    cfg: ConvergenceConfig = DEFAULT_CONFIG,
    aggregator: bool = False,
) -> SplitResult:
    """Route ``amount_in`` as K equal sequential parts of amount_in/K.

    K=1 is definitionally identical to a plain route.  The input line
    graph is never mutated; parts run against a private working copy.
    """
    if k < 1:
        raise ConfigError(f"split count must be >= 1, got {k}")
    if amount_in <= 0:
        raise ValueError(f"amount_in must be > 0, got {amount_in}")

    working = lg.clone_working()
    part_in = amount_in / k
    parts: list[RouteResult] = []
    for part in range(k):
        state = route(working, part_in, order, cfg)
        try:
            result = extract_result(state, target, part=part)
        except NoRouteError as exc:
            raise SplitNoRouteError(
                f"part {part + 1} of {k} found no route: {exc}", parts
            ) from exc
        parts.append(result)
        if part < k - 1:
            for hop in result.plan.hops:
                vertex_id = working.topo.vertex_by_key[(hop.pool.pool_ref, hop.pool.token_in)]
                working.apply_hop(vertex_id, hop.amount_in, hop.amount_out)

    total_out = sum(p.amount_out for p in parts)
    merged = merge_plans(parts)
    _, realized = merged.replay()
    if abs(realized - total_out) > REPLAY_REL_TOL * max(abs(total_out), 1e-300):
        raise InternalConsistencyError(
            f"merged plan replays to {realized}, expected {total_out}"
        )
    return SplitResult(
        total_out=total_out,
        parts=tuple(parts),
        merged_plan=merged,
        k=k,
        aggregator=aggregator,
    )


def _coalesce_run(run: list[PlanHop]) -> PlanHop:
    first = run[0]
    return PlanHop(
        pool=first.pool,
        amount_in=sum(h.amount_in for h in run),
        amount_out=0.0,  # recomputed by replay below
        parts=tuple(p for h in run for p in h.parts),
        terminal=first.terminal,
    )


def merge_plans(parts: list[RouteResult]) -> TradePlan:
    """Concatenate part plans in execution order into one implementable plan.

    Consecutive hops through the same pool in the same direction are
    coalesced into a single hop with summed input, but only when the
    coalesced plan replays to the same realized total within 1e-9
    relative; otherwise the hops are kept separate (with nonzero fees a
    merged swap pays less than two sequential halves, so such runs stay
    split).
    """
    if not parts:
        raise ConfigError("merge_plans requires at least one part")
    hops: list[PlanHop] = [
        hop for idx, part in enumerate(parts) for hop in _retag(part.plan, idx).hops
    ]
    baseline_plan = TradePlan(hops=tuple(hops))
    _, baseline = baseline_plan.replay()

    # group consecutive hops by (pool, direction, terminal flag)
    runs: list[list[PlanHop]] = []
    for hop in hops:
        if (
            runs
            and runs[-1][0].pool.pool_ref == hop.pool.pool_ref
            and runs[-1][0].pool.token_in == hop.pool.token_in
            and runs[-1][0].terminal == hop.terminal
        ):
            runs[-1].append(hop)
        else:
            runs.append([hop])

    decided: list[list[PlanHop]] = []
    for idx, run in enumerate(runs):
        if len(run) < 2:
            decided.append(run)
            continue
        coalesced = _coalesce_run(run)
        candidate_hops = [h for r in decided for h in r]
        position = len(candidate_hops)
        candidate_hops.append(coalesced)
        candidate_hops.extend(h for r in runs[idx + 1 :] for h in r)
        outputs, realized = TradePlan(hops=tuple(candidate_hops)).replay()
        if abs(realized - baseline) <= REPLAY_REL_TOL * max(abs(baseline), 1e-300):
            decided.append([replace(coalesced, amount_out=outputs[position])])
        else:
            logger.debug(
                "kept %d hops through %s separate: coalescing is not replay-neutral",
                len(run),
                run[0].pool.pool_ref,
            )
            decided.append(run)

    final = TradePlan(hops=tuple(hop for run in decided for hop in run))
    _, realized = final.replay()
    if abs(realized - baseline) > REPLAY_REL_TOL * max(abs(baseline), 1e-300):
        raise InternalConsistencyError(
            f"plan coalescing drifted: replay {realized} != baseline {baseline}"
        )
    return final
