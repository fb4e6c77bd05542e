"""Executable trade plans: ordered pool hops with recorded amounts.

A plan is self-contained: each hop embeds the pool state it was planned
against, and the first hop touching a pool defines that pool's starting
reserves for replay.  Replaying a plan therefore needs no external
snapshot and reproduces the sequential execution semantics under which
the amounts were computed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .amm import DirectedPool, swap_out


@dataclass(frozen=True)
class PlanHop:
    pool: DirectedPool
    amount_in: float
    amount_out: float
    # which split parts this hop belongs to (several after coalescing)
    parts: tuple[int, ...] = (0,)
    # terminal hops deliver target tokens; their outputs are the plan's yield
    terminal: bool = True

    def to_record(self) -> dict:
        return {
            "pool_ref": self.pool.pool_ref,
            "dex": self.pool.dex,
            "token_in": self.pool.token_in,
            "token_out": self.pool.token_out,
            "amount_in": self.amount_in,
            "amount_out": self.amount_out,
            "parts": list(self.parts),
        }


@dataclass(frozen=True)
class TradePlan:
    hops: tuple[PlanHop, ...]

    def __len__(self) -> int:
        return len(self.hops)

    def replay(self) -> tuple[list[float], float]:
        """Re-execute the plan hop by hop with sequential reserve updates.

        Returns the recomputed per-hop outputs and the realized total:
        the summed outputs of terminal hops.
        """
        reserves: dict[str, dict[str, float]] = {}
        outputs = []
        realized = 0.0
        for hop in self.hops:
            ref = hop.pool.pool_ref
            state = reserves.get(ref)
            if state is None:
                state = {
                    hop.pool.token_in: hop.pool.reserve_in,
                    hop.pool.token_out: hop.pool.reserve_out,
                }
                reserves[ref] = state
            live = replace(
                hop.pool,
                reserve_in=state[hop.pool.token_in],
                reserve_out=state[hop.pool.token_out],
            )
            out = swap_out(live, hop.amount_in)
            state[hop.pool.token_in] += hop.amount_in
            state[hop.pool.token_out] -= out
            outputs.append(out)
            if hop.terminal:
                realized += out
        return outputs, realized

    def to_records(self) -> list[dict]:
        return [hop.to_record() for hop in self.hops]
