"""Seeded random pool-set generators for experiments and fixtures.

Topologies are connected (random spanning tree plus random extra pools,
no duplicate token pairs).  Two reserve models are supported:

* ``loguniform`` — each reserve drawn independently, log-uniform over
  [min_reserve, max_reserve].  Matches nothing but chaos: independent
  reserves routinely misprice cycles and create arbitrage, which is
  fine for stress tests but makes the relaxation converge slowly.
* ``priced`` — each token gets a latent price, each pool a latent USD
  depth, and reserves are set so the pool's marginal price agrees with
  the latent prices up to ``noise``.  With 2*noise below the pool fee,
  every cycle is strictly lossy, so routing quiesces and iteration
  strategies can be compared on equal footing.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import ConfigError
from .marketdata import PoolSnapshot


@dataclass(frozen=True)
class ReserveSpec:
    kind: str = "loguniform"  # "loguniform" | "priced"
    min_reserve: float = 1e3
    max_reserve: float = 1e7
    depth_min: float = 1e4
    depth_max: float = 1e6
    price_min: float = 0.01
    price_max: float = 100.0
    noise: float = 0.0

    @classmethod
    def from_dict(cls, obj: dict) -> "ReserveSpec":
        spec = cls(**obj)
        if spec.kind not in ("loguniform", "priced"):
            raise ConfigError(f"unknown reserve distribution {spec.kind!r}")
        return spec


def _log_uniform(rng: random.Random, lo: float, hi: float) -> float:
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def gen_synthetic_graph(
    n_tokens: int,
    n_pools: int,
    seed: int,
    reserves: ReserveSpec = ReserveSpec(),
    dex: str = "synth",
    fee_bps: int = 30,
) -> list[PoolSnapshot]:
    """Generate a connected random pool set, deterministic per seed."""
    if n_tokens < 2:
        raise ConfigError(f"need at least 2 tokens, got {n_tokens}")
    if n_pools < n_tokens - 1:
        raise ConfigError(
            f"{n_pools} pools cannot connect {n_tokens} tokens (need >= {n_tokens - 1})"
        )
    max_pairs = n_tokens * (n_tokens - 1) // 2
    if n_pools > max_pairs:
        raise ConfigError(f"{n_pools} pools exceed the {max_pairs} distinct token pairs")

    rng = random.Random(seed)
    tokens = [f"T{i:03d}" for i in range(n_tokens)]

    pairs = set()
    order = list(range(n_tokens))
    rng.shuffle(order)
    for i in range(1, n_tokens):
        j = order[rng.randrange(i)]
        a, b = sorted((tokens[order[i]], tokens[j]))
        pairs.add((a, b))
    remaining = [
        (tokens[i], tokens[j])
        for i in range(n_tokens)
        for j in range(i + 1, n_tokens)
        if (tokens[i], tokens[j]) not in pairs
    ]
    extra = rng.sample(remaining, n_pools - len(pairs))
    pair_list = sorted(pairs) + sorted(extra)

    prices = {t: _log_uniform(rng, reserves.price_min, reserves.price_max) for t in tokens}

    pools = []
    for token0, token1 in pair_list:
        if reserves.kind == "loguniform":
            r0 = _log_uniform(rng, reserves.min_reserve, reserves.max_reserve)
            r1 = _log_uniform(rng, reserves.min_reserve, reserves.max_reserve)
        else:
            depth = _log_uniform(rng, reserves.depth_min, reserves.depth_max)
            r0 = depth / prices[token0] * (1.0 + rng.uniform(-reserves.noise, reserves.noise))
            r1 = depth / prices[token1] * (1.0 + rng.uniform(-reserves.noise, reserves.noise))
        pools.append(
            PoolSnapshot(
                dex=dex,
                token0=token0,
                token1=token1,
                reserve0=r0,
                reserve1=r1,
                fee_bps=fee_bps,
            )
        )
    return sorted(pools, key=lambda p: p.key)


def clone_pools_for_dex(
    pools: list[PoolSnapshot],
    dex: str,
    seed: int,
    depth_jitter: float = 0.1,
) -> list[PoolSnapshot]:
    """A same-topology copy of a pool set under a new DEX tag.

    Both reserves of each pool are scaled by one factor, so marginal
    prices match the original and no cross-DEX arbitrage is introduced.
    """
    rng = random.Random(seed)
    out = []
    for pool in pools:
        scale = 1.0 + rng.uniform(-depth_jitter, depth_jitter)
        out.append(
            PoolSnapshot(
                dex=dex,
                token0=pool.token0,
                token1=pool.token1,
                reserve0=pool.reserve0 * scale,
                reserve1=pool.reserve1 * scale,
                fee_bps=pool.fee_bps,
            )
        )
    return sorted(out, key=lambda p: p.key)
