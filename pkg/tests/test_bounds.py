from fractions import Fraction as Fr
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cachedof.bounds import (
    ConfigGrid,
    bruteforce_min_blocks,
    centralized_vs_decentralized_ratio,
    check_block_feasibility,
    default_grid,
    dof_upper_bound,
    dof_upper_bound_array,
    gap_centralized,
    gap_decentralized,
    optimal_split,
    sweep_gaps,
    verify_counting_bounds,
)
from cachedof.centralized import centralized_place, centralized_schedule, dof_centralized
from cachedof.decentralized import decentralized_place, dof_decentralized
from cachedof.model import (
    Block,
    CachingRealization,
    Delivery,
    InstanceTooLarge,
    NetworkConfig,
    PacketId,
    UnservablePacket,
    check_demands,
)

from reference import min_blocks_ref, upper_ref

SIXTEEN = NetworkConfig(16, 16, 16, 1, Fr(1, 2), Fr(1, 16))


class TestUpperBound:
    def test_sixteen_nodes(self):
        assert dof_upper_bound(SIXTEEN) == Fr(48, 5)
        assert dof_upper_bound(SIXTEEN.with_alpha(0)) == Fr(32, 15)

    def test_no_receiver_memory(self):
        c = NetworkConfig(4, 8, 8, 1, Fr(3, 4), 0)
        assert dof_upper_bound(c) == 3

    def test_full_receiver_memory(self):
        assert dof_upper_bound(SIXTEEN.with_mu_r(1)) == 16

    @given(st.integers(1, 32), st.integers(1, 32), st.integers(1, 16), st.integers(0, 16), st.integers(0, 10))
    def test_reference_and_sandwich(self, kt, kr, a, b, al):
        mut = Fr(max(a, -(-16 // kt)), 16)
        c = NetworkConfig(kt, kr, kr, 1, mut, Fr(b, 16), Fr(al, 10))
        up = dof_upper_bound(c)
        assert up == upper_ref(kt, kr, mut, Fr(b, 16), Fr(al, 10))
        assert dof_decentralized(c) <= dof_centralized(c) <= up
        assert up == c.alpha * dof_upper_bound(c.with_alpha(1)) + c.alpha_bar * dof_upper_bound(c.with_alpha(0))

    def test_vectorized(self):
        arr = dof_upper_bound_array([16, 16, 8], [16, 16, 4], [0.5, 0.5, 0.25], [1 / 16, 1.0, 0.5], [1, 0, 0.3])
        assert np.allclose(arr, [9.6, 16, float(dof_upper_bound(NetworkConfig(8, 4, 4, 1, Fr(1, 4), Fr(1, 2), Fr(3, 10))))])


class TestGaps:
    def test_sixteen_nodes(self):
        assert gap_centralized(SIXTEEN).ratio == Fr(16, 15)
        assert gap_centralized(SIXTEEN.with_alpha(0)).ratio == Fr(16, 15)

    def test_two_receiver_decentralized(self):
        rep = gap_decentralized(NetworkConfig(2, 2, 2, 1, Fr(1, 2), Fr(1, 2), 0))
        assert (rep.upper, rep.achievable, rep.ratio) == (2, Fr(4, 3), Fr(3, 2))

    def test_single_receiver(self):
        rep = gap_decentralized(NetworkConfig(3, 1, 1, 1, Fr(1, 3), Fr(1, 2), Fr(1, 2)))
        assert rep.achievable == rep.upper == 1

    def test_small_receiver_memory_ratio_tends_to_one(self):
        c = NetworkConfig(2, 8, 8, 1, Fr(1, 2), Fr(1, 10 ** 6), 0)
        assert abs(float(gap_decentralized(c).ratio) - 1) < 1e-4

    def test_full_memory(self):
        rep = gap_centralized(SIXTEEN.with_mu_r(1))
        assert rep.achievable == rep.upper == 16


class TestGrid:
    def test_default_grid_size(self):
        assert len(default_grid()) >= 5000

    def test_sweep(self):
        sw = sweep_gaps()
        assert sw.passed
        assert sw.max_centralized_gap <= 2 + 1e-9
        assert sw.max_decentralized_gap <= 3 + 1e-9
        assert sw.max_cen_over_dec == pytest.approx(1.5, abs=1e-12)

    def test_cen_over_dec_at_the_two_receiver_corner(self):
        ratio, where = centralized_vs_decentralized_ratio([NetworkConfig(2, 2, 2, 1, Fr(1, 2), Fr(1, 2), 0)])
        assert ratio == pytest.approx(1.5) and where.num_rx == 2
        ratio, _ = centralized_vs_decentralized_ratio([NetworkConfig(1, 1, 1, 1, 1, 0)])
        assert ratio == 1

    def test_grid_roundtrip(self):
        cfgs = [SIXTEEN, SIXTEEN.with_alpha(Fr(3, 10))]
        g = ConfigGrid.from_configs(cfgs)
        assert list(g.configs()) == cfgs


def _real(tx: dict, rx: dict, kt=2, kr=2, n=2, f=1):
    return CachingRealization.from_holders(kt, kr, n, f, tx, rx)


class TestFeasibility:
    def test_n_block_with_uncached_packet(self):
        real = _real({PacketId(1, 1): {1}, PacketId(2, 1): {2}}, {PacketId(2, 1): {1}})
        blk = Block("N", (Delivery(1, PacketId(1, 1)), Delivery(2, PacketId(2, 1))))
        res = check_block_feasibility(blk, real)
        assert not res and res.witness == Delivery(1, PacketId(1, 1))

    def test_p_block_at_capacity(self):
        real = _real({PacketId(1, 1): {1}, PacketId(2, 1): {2}},
                     {PacketId(1, 1): {2}, PacketId(2, 1): {1}})
        blk = Block("P", (Delivery(1, PacketId(1, 1)), Delivery(2, PacketId(2, 1))))
        assert check_block_feasibility(blk, real)

    def test_empty_block(self):
        assert check_block_feasibility(Block("P", ()), _real({}, {}))

    def test_duplicate_receiver(self):
        real = _real({PacketId(1, 1): {1, 2}, PacketId(1, 2): {1, 2}}, {}, f=2)
        blk = Block("P", (Delivery(1, PacketId(1, 1)), Delivery(1, PacketId(1, 2))))
        assert not check_block_feasibility(blk, real)

    def test_unservable(self):
        with pytest.raises(UnservablePacket):
            check_block_feasibility(Block("P", (Delivery(1, PacketId(1, 1)),)), _real({}, {}))


class TestOracle:
    def test_two_receivers_no_memory(self):
        real = _real({PacketId(1, 1): {1}, PacketId(2, 1): {2}}, {})
        res = bruteforce_min_blocks(real, [1, 2], 1)
        assert (res.p_blocks, res.n_blocks, res.q) == (2, 2, 1)

    def test_matches_centralized_at_two_packets(self):
        pl = centralized_place(NetworkConfig(2, 2, 2, 2, Fr(1, 2), 0, 1))
        sched = centralized_schedule(pl, [1, 2])
        res = bruteforce_min_blocks(pl.realization, [1, 2], 1)
        assert res.p_blocks == len(sched.p_blocks) == 4

    def test_everything_cached(self):
        full = {PacketId(n, 1): {1, 2} for n in (1, 2)}
        res = bruteforce_min_blocks(_real(full, full), [1, 2], Fr(1, 2))
        assert (res.p_blocks, res.n_blocks, res.max_load) == (0, 0, 0)

    def test_too_large(self):
        pl = centralized_place(NetworkConfig(2, 2, 2, 20, Fr(1, 2), 0))
        with pytest.raises(InstanceTooLarge):
            bruteforce_min_blocks(pl.realization, [1, 2], 1)

    def test_beats_first_fit_in_receiver_order(self):
        # receivers 1 and 2 need one packet each, receiver 3 needs two; all fit 2-blocks
        rx = {PacketId(1, 1): {1}, PacketId(1, 2): {2}, PacketId(2, 1): {2}, PacketId(2, 2): {1},
              PacketId(3, 1): {1}, PacketId(3, 2): {1}}
        tx = {p: {1} for p in rx}
        real = _real(tx, rx, kt=1, kr=3, n=3, f=2)
        items = real.uncached_demands(check_demands([1, 2, 3], 3, 3))
        first_fit = []
        for j, _ in items:
            for blk in first_fit:
                if len(blk) < 2 and j not in blk:
                    blk.append(j)
                    break
            else:
                first_fit.append([j])
        assert len(first_fit) == 3
        assert bruteforce_min_blocks(real, [1, 2, 3], 1).p_blocks == 2

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_random_realizations_match_enumeration(self, seed):
        rnd = random.Random(seed)
        kt, kr = rnd.randint(1, 3), rnd.randint(2, 4)
        nfiles, F = kr, rnd.randint(1, 3)
        tx = {PacketId(n, f): set(rnd.sample(range(1, kt + 1), rnd.randint(1, kt)))
              for n in range(1, nfiles + 1) for f in range(1, F + 1)}
        rx = {p: {j for j in range(1, kr + 1) if rnd.random() < 0.3} for p in tx}
        real = _real(tx, rx, kt, kr, nfiles, F)
        demands = list(range(1, kr + 1))
        rnd.shuffle(demands)
        res = bruteforce_min_blocks(real, demands, Fr(1, 2))
        items = real.uncached_demands(check_demands(demands, kr, nfiles))
        rcv = [j for j, _ in items]
        p_caps = [len(real.tx_holders(p)) + len(real.rx_holders(p)) for _, p in items]
        n_caps = [len(real.rx_holders(p)) + 1 for _, p in items]
        assert res.p_blocks == min_blocks_ref(rcv, p_caps)
        assert res.n_blocks == min_blocks_ref(rcv, n_caps)
        for blk in res.p_partition:
            assert check_block_feasibility(blk, real, "P")
        for blk in res.n_partition:
            assert check_block_feasibility(blk, real, "N")
        assert sorted(d for b in res.p_partition for d in b) == sorted(items)

    @given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 10))
    def test_optimal_split_balances(self, hp, hn, al):
        # block counts are both zero (nothing to send) or both positive
        a = Fr(al, 10)
        q, load = optimal_split(hp, hn, a)
        assert 0 <= q <= 1
        # compare with a fine scan over q
        def cost(x):
            p = 0 if hp == 0 or x == 0 else (float("inf") if a == 0 else x / a * hp)
            n = 0 if hn == 0 or x == 1 else (float("inf") if a == 1 else (1 - x) / (1 - a) * hn)
            return max(p, n)
        assert cost(q) == load
        assert all(cost(Fr(k, 50)) >= load for k in range(51))


class TestCounting:
    @pytest.mark.parametrize("kt,kr,t,s,F", [(2, 2, 1, 1, 4), (3, 3, 1, 2, 9), (2, 4, 2, 2, 6), (3, 2, 1, 0, 3)])
    def test_centralized_is_tight(self, kt, kr, t, s, F):
        pl = centralized_place(NetworkConfig(kt, kr, kr, F, Fr(t, kt), Fr(s, kr)))
        rep = verify_counting_bounds(pl)
        assert rep.holds and rep.library_tight

    def test_empty_receiver_caches(self):
        pl = centralized_place(NetworkConfig(2, 3, 3, 2, Fr(1, 2), 0))
        assert verify_counting_bounds(pl).receiver_lhs == 0

    def test_random_decentralized_placements(self):
        c = NetworkConfig(2, 3, 3, 6, Fr(1, 2), Fr(1, 3))
        for seed in range(100):
            assert verify_counting_bounds(decentralized_place(c, seed)).holds

    def test_reports_uncovered_packets(self):
        real = _real({PacketId(1, 1): {1}}, {})
        rep = verify_counting_bounds(real, mu_r=0)
        assert rep.uncovered == 1 and not rep.holds
