"""Constant-product swap math with the fee-on-input convention.

A directed pool with input-side reserve x, output-side reserve y and
fee factor g = 1 - fee_bps/10000 pays out

    y * g * dx / (x + g * dx)

for an input of dx.  The full dx (fee included) is credited to the
input reserve on execution, so the reserve product never decreases;
with fee 0 it is exactly invariant.  All arithmetic is in doubles;
on-chain integer semantics is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import InsolvencyError


@dataclass(frozen=True)
class DirectedPool:
    """One trade direction of a liquidity pool.

    Every pool yields exactly two DirectedPools (the two directions);
    both share the same ``pool_ref`` and must be updated together by
    the graph layer that owns them.
    """

    pool_ref: str
    dex: str
    token_in: str
    token_out: str
    reserve_in: float
    reserve_out: float
    fee_bps: int = 30

    @property
    def gamma(self) -> float:
        return 1.0 - self.fee_bps / 10_000.0

    @property
    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.token_in, self.token_out, self.dex, self.pool_ref)


def swap_out(pool: DirectedPool, amount_in: float) -> float:
    """Exact output of trading ``amount_in`` through one directed pool.

    Monotone nondecreasing and strictly concave in ``amount_in``;
    always strictly below ``reserve_out``.
    """
    if amount_in < 0:
        raise ValueError(f"amount_in must be >= 0, got {amount_in}")
    if amount_in == 0:
        return 0.0
    effective = pool.gamma * amount_in
    return pool.reserve_out * effective / (pool.reserve_in + effective)


def apply_swap(pool: DirectedPool, amount_in: float, amount_out: float) -> DirectedPool:
    """Reserve update after executing a swap: in += amount_in, out -= amount_out.

    The caller must update the paired reverse-direction DirectedPool of
    the same pool_ref consistently (see LineGraph.apply_hop).
    """
    if amount_in < 0 or amount_out < 0:
        raise ValueError("swap amounts must be >= 0")
    if amount_out >= pool.reserve_out:
        raise InsolvencyError(
            f"cannot take {amount_out} out of pool {pool.pool_ref} "
            f"holding only {pool.reserve_out} {pool.token_out}"
        )
    return replace(
        pool,
        reserve_in=pool.reserve_in + amount_in,
        reserve_out=pool.reserve_out - amount_out,
    )
