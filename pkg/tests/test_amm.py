"""Constant-product swap math tests.

Expected values are derived independently from the x*y=k algebra before
being asserted against the implementation.
"""

import math
import random

import pytest

from amm_pathfinder.amm import DirectedPool, apply_swap, swap_out
from amm_pathfinder.errors import InsolvencyError


def pool(reserve_in=100.0, reserve_out=100.0, fee_bps=0):
    return DirectedPool(
        pool_ref="d:A/B",
        dex="d",
        token_in="A",
        token_out="B",
        reserve_in=reserve_in,
        reserve_out=reserve_out,
        fee_bps=fee_bps,
    )


class TestSwapOut:
    def test_fee_free_hand_value(self):
        """x*y=k algebra: out = 100*10/(100+10)."""
        expected = 100.0 * 10.0 / 110.0
        assert swap_out(pool(), 10.0) == pytest.approx(expected, rel=1e-12)

    def test_zero_input_gives_zero(self):
        assert swap_out(pool(), 0.0) == 0.0

    def test_fee_30_bps_hand_value(self):
        """Substitute gamma = 0.997 into the closed form."""
        expected = 100.0 * 9.97 / 109.97
        out = swap_out(pool(fee_bps=30), 10.0)
        assert out == pytest.approx(expected, rel=1e-12)
        # V2 accounting check: the full input lands in reserves, so the
        # product never decreases, and strictly grows when a fee applies.
        assert (100.0 + 10.0) * (100.0 - out) >= 100.0 * 100.0

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError, match="amount_in"):
            swap_out(pool(), -1.0)

    def test_constant_product_fee_free(self, rng):
        """(x + dx) * (y - out) == x * y to 1e-12 relative, 1000 samples."""
        for _ in range(1000):
            x = math.exp(rng.uniform(0, 20))
            y = math.exp(rng.uniform(0, 20))
            dx = x * math.exp(rng.uniform(-8, 2))
            out = swap_out(pool(reserve_in=x, reserve_out=y), dx)
            k = x * y
            assert abs((x + dx) * (y - out) - k) <= 1e-12 * k

    def test_slippage_monotonicity(self, rng):
        """The average price worsens with trade size."""
        for _ in range(200):
            x = math.exp(rng.uniform(0, 15))
            y = math.exp(rng.uniform(0, 15))
            d1 = x * math.exp(rng.uniform(-6, 0))
            d2 = d1 * math.exp(rng.uniform(0.1, 3))
            p = pool(reserve_in=x, reserve_out=y)
            assert swap_out(p, d1) / d1 > swap_out(p, d2) / d2

    def test_output_bounded_by_reserve(self, rng):
        for _ in range(200):
            y = math.exp(rng.uniform(0, 15))
            p = pool(reserve_in=math.exp(rng.uniform(0, 15)), reserve_out=y)
            assert swap_out(p, math.exp(rng.uniform(0, 25))) < y

    def test_fee_reduces_output(self, rng):
        for _ in range(200):
            x = math.exp(rng.uniform(0, 15))
            y = math.exp(rng.uniform(0, 15))
            dx = x * math.exp(rng.uniform(-6, 1))
            assert swap_out(pool(x, y, 30), dx) < swap_out(pool(x, y, 0), dx)


class TestApplySwap:
    def test_reserve_update_hand_value(self):
        p = pool()
        out = swap_out(p, 10.0)
        updated = apply_swap(p, 10.0, out)
        assert updated.reserve_in == pytest.approx(110.0, rel=1e-12)
        assert updated.reserve_out == pytest.approx(100.0 - 100.0 * 10.0 / 110.0, rel=1e-12)

    def test_zero_amounts_identity(self):
        p = pool()
        updated = apply_swap(p, 0.0, 0.0)
        assert updated == p

    def test_draining_pool_rejected(self):
        with pytest.raises(InsolvencyError):
            apply_swap(pool(), 10.0, 100.0)

    def test_original_not_mutated(self):
        p = pool()
        apply_swap(p, 10.0, swap_out(p, 10.0))
        assert p.reserve_in == 100.0 and p.reserve_out == 100.0
