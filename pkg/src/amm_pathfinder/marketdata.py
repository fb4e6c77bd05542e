"""Loading, validation, and filtering of pool-reserve snapshots.

Snapshot files are JSON Lines, one pool per line:

    {"token0": "WETH", "token1": "USDC", "reserve0": 100.0,
     "reserve1": 250000.0, "fee_bps": 30, "dex": "uniswap_v2"}

``reserve0``/``reserve1`` may be numbers or numeric strings; ``fee_bps``
defaults to 30 (the Uniswap V2 / Sushiswap V2 production fee) and ``dex``
in the file is overridden by the loader's ``dex`` argument when given.
Price files are a single JSON object ``{token: price_usd}``.

All functions here are pure over immutable inputs and safe to call from
multiple threads.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

from .errors import ConfigError, PriceTableError, SnapshotParseError

logger = logging.getLogger("amm_pathfinder.marketdata")

# A token is identified by an exact, non-empty string (ticker or address).
TokenId = str

DEFAULT_FEE_BPS = 30


@dataclass(frozen=True, order=True)
class PoolSnapshot:
    """One liquidity pool's reserves and fee, tagged with its DEX of origin."""

    dex: str
    token0: TokenId
    token1: TokenId
    reserve0: float
    reserve1: float
    fee_bps: int = DEFAULT_FEE_BPS

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.dex, self.token0, self.token1)

    def to_record(self) -> dict:
        return {
            "dex": self.dex,
            "token0": self.token0,
            "token1": self.token1,
            "reserve0": self.reserve0,
            "reserve1": self.reserve1,
            "fee_bps": self.fee_bps,
        }


@dataclass(frozen=True)
class FilterPolicy:
    """Declarative pool-retention policy.

    ``min_reserve_usd`` keeps pools whose combined USD depth
    (reserve0*p0 + reserve1*p1) meets the threshold.  ``top_n_tokens``
    keeps the n tokens with the highest summed USD depth across their
    pools and drops pools not between kept tokens.  Zero-reserve pools
    and duplicate (dex, token0, token1) records (last one wins) are
    always dropped.
    """

    min_reserve_usd: float = 0.0
    top_n_tokens: int | None = None


def _parse_reserve(raw, field_name, path, line_no) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise SnapshotParseError(path, line_no, field_name, f"expected a number, got {raw!r}")
    try:
        value = float(raw)
    except ValueError:
        raise SnapshotParseError(path, line_no, field_name, f"not numeric: {raw!r}") from None
    if not math.isfinite(value) or value < 0:
        raise SnapshotParseError(path, line_no, field_name, f"must be finite and >= 0, got {value}")
    return value


def _parse_line(obj, path, line_no, dex) -> PoolSnapshot:
    for name in ("token0", "token1", "reserve0", "reserve1"):
        if name not in obj:
            raise SnapshotParseError(path, line_no, name, "missing required field")
    token0, token1 = obj["token0"], obj["token1"]
    for name, token in (("token0", token0), ("token1", token1)):
        if not isinstance(token, str) or not token:
            raise SnapshotParseError(path, line_no, name, "must be a non-empty string")
    if token0 == token1:
        raise SnapshotParseError(path, line_no, "token1", "token0 and token1 must differ")

    reserve0 = _parse_reserve(obj["reserve0"], "reserve0", path, line_no)
    reserve1 = _parse_reserve(obj["reserve1"], "reserve1", path, line_no)

    fee_raw = obj.get("fee_bps", DEFAULT_FEE_BPS)
    if isinstance(fee_raw, bool) or not isinstance(fee_raw, int):
        raise SnapshotParseError(path, line_no, "fee_bps", f"must be an integer, got {fee_raw!r}")
    if not 0 <= fee_raw < 10_000:
        raise SnapshotParseError(path, line_no, "fee_bps", f"must be in [0, 10000), got {fee_raw}")

    resolved_dex = dex if dex is not None else obj.get("dex", "default")
    if not isinstance(resolved_dex, str) or not resolved_dex:
        raise SnapshotParseError(path, line_no, "dex", "must be a non-empty string")

    return PoolSnapshot(
        dex=resolved_dex,
        token0=token0,
        token1=token1,
        reserve0=reserve0,
        reserve1=reserve1,
        fee_bps=fee_raw,
    )


def load_snapshot(path, dex: str | None = None) -> list[PoolSnapshot]:
    """Parse a JSON Lines snapshot file into PoolSnapshot records.

    ``dex`` overrides any per-line ``dex`` field; when omitted, the
    file's field is used (falling back to ``"default"``).  Raises
    SnapshotParseError naming the line and field on the first malformed
    record, and OSError on IO failure.
    """
    pools = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise SnapshotParseError(path, line_no, "<line>", f"invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise SnapshotParseError(path, line_no, "<line>", "expected a JSON object")
            pools.append(_parse_line(obj, path, line_no, dex))
    logger.info("loaded %d pools from %s", len(pools), path)
    return pools


def dump_snapshot(pools, path) -> None:
    """Write pools back out in the snapshot file format (one JSON object per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        for pool in pools:
            fh.write(json.dumps(pool.to_record()) + "\n")


def load_prices(path) -> dict[TokenId, float]:
    """Load a {token: price_usd} JSON object; all prices must be > 0."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PriceTableError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise PriceTableError(f"{path}: expected a JSON object of token -> price")
    prices = {}
    for token, raw in obj.items():
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise PriceTableError(f"{path}: price of {token!r} must be a number, got {raw!r}")
        price = float(raw)
        if not math.isfinite(price) or price <= 0:
            raise PriceTableError(f"{path}: price of {token!r} must be > 0, got {price}")
        prices[token] = price
    return prices


def pool_depth_usd(pool: PoolSnapshot, prices: dict[TokenId, float]) -> float:
    """USD depth of a pool: reserve0*p0 + reserve1*p1."""
    for token in (pool.token0, pool.token1):
        if token not in prices:
            raise ConfigError(f"no price for token {token!r} required by the filter policy")
    return pool.reserve0 * prices[pool.token0] + pool.reserve1 * prices[pool.token1]


def filter_pools(
    pools,
    policy: FilterPolicy = FilterPolicy(),
    prices: dict[TokenId, float] | None = None,
) -> list[PoolSnapshot]:
    """Apply a FilterPolicy, returning a deduplicated, sorted subset.

    Output is sorted by (dex, token0, token1); input records are never
    mutated.  Idempotent: filtering an already-filtered list is a no-op.
    """
    by_key: dict[tuple, PoolSnapshot] = {}
    for pool in pools:
        if pool.key in by_key:
            logger.warning("duplicate pool record %s: keeping the last occurrence", pool.key)
        by_key[pool.key] = pool

    kept = [p for p in by_key.values() if p.reserve0 > 0 and p.reserve1 > 0]

    if policy.min_reserve_usd > 0:
        if prices is None:
            raise ConfigError("min_reserve_usd threshold requires a price table")
        kept = [p for p in kept if pool_depth_usd(p, prices) >= policy.min_reserve_usd]

    if policy.top_n_tokens is not None:
        if policy.top_n_tokens < 1:
            raise ConfigError(f"top_n_tokens must be >= 1, got {policy.top_n_tokens}")
        if prices is None:
            raise ConfigError("top_n_tokens selection requires a price table")
        depth: dict[str, float] = {}
        for p in kept:
            for token, reserve in ((p.token0, p.reserve0), (p.token1, p.reserve1)):
                if token not in prices:
                    raise ConfigError(f"no price for token {token!r} required by the filter policy")
                depth[token] = depth.get(token, 0.0) + reserve * prices[token]
        ranked = sorted(depth, key=lambda t: (-depth[t], t))
        keep_set = set(ranked[: policy.top_n_tokens])
        kept = [p for p in kept if p.token0 in keep_set and p.token1 in keep_set]

    return sorted(kept, key=lambda p: p.key)
