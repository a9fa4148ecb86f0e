"""Centralized placement and the one-shot P/N delivery schedule."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .model import (
    Block,
    CachingRealization,
    Delivery,
    DeliverySchedule,
    DemandVector,
    IndivisibleF,
    NetworkConfig,
    PacketId,
    Real,
    as_int,
    binom,
    check_demands,
    exact,
    pack_distinct,
    validate_config,
)


def block_capacities(cfg: NetworkConfig) -> tuple[Real, Real]:
    """Receivers served per P-block (zero-forcing plus cache cancellation) and per N-block."""
    kr = exact(cfg.num_rx)
    t = exact(cfg.tx_load)
    s = exact(cfg.rx_load)
    return min(t + s, kr), min(1 + s, kr)


def dof_centralized(cfg: NetworkConfig) -> Real:
    cap_p, cap_n = block_capacities(cfg)
    a = exact(cfg.alpha)
    return a * cap_p + (1 - a) * cap_n


def splitting_ratio_centralized(cfg: NetworkConfig) -> Real:
    cap_p, cap_n = block_capacities(cfg)
    a = exact(cfg.alpha)
    return a * cap_p / (a * cap_p + (1 - a) * cap_n)


def delivery_time_centralized(cfg: NetworkConfig) -> Real:
    """Time-slots per packet of file size (divide out F)."""
    return cfg.num_rx * (1 - exact(cfg.mu_r)) / dof_centralized(cfg)


def dof_centralized_array(kt, kr, mut, mur, alpha) -> np.ndarray:
    kt, kr, mut, mur, alpha = np.broadcast_arrays(*map(np.asarray, (kt, kr, mut, mur, alpha)))
    t = kt * mut
    s = kr * mur
    return alpha * np.minimum(t + s, kr) + (1 - alpha) * np.minimum(1 + s, kr)


@dataclass(frozen=True)
class CentralizedPlacement:
    cfg: NetworkConfig
    realization: CachingRealization
    subfile_index: dict  # (n, T, R) -> range of 1-based packet indices
    tx_caches: tuple[frozenset, ...]
    rx_caches: tuple[frozenset, ...]

    @property
    def subfile_size(self) -> int:
        return len(next(iter(self.subfile_index.values())))


def subfile_count(cfg: NetworkConfig) -> int:
    return binom(cfg.num_tx, as_int(cfg.tx_load)) * binom(cfg.num_rx, as_int(cfg.rx_load))


def centralized_place(cfg: NetworkConfig) -> CentralizedPlacement:
    validate_config(cfg, "scheduler", "centralized", demands=False)
    t, s = as_int(cfg.tx_load), as_int(cfg.rx_load)
    kt, kr, nfiles, F = cfg.num_tx, cfg.num_rx, cfg.num_files, cfg.packets_per_file
    parts = subfile_count(cfg)
    if F % parts:
        raise IndivisibleF(
            f"F = {F} is not a multiple of the {parts} subfiles per file", smallest_valid=parts)
    size = F // parts

    tx = np.zeros((kt, nfiles, F), dtype=bool)
    rx = np.zeros((kr, nfiles, F), dtype=bool)
    index = {}
    tx_labels = [set() for _ in range(kt)]
    rx_labels = [set() for _ in range(kr)]
    for n in range(1, nfiles + 1):
        start = 1
        for T in combinations(range(1, kt + 1), t):
            for R in combinations(range(1, kr + 1), s):
                label = (n, T, R)
                index[label] = range(start, start + size)
                sl = slice(start - 1, start - 1 + size)
                for i in T:
                    tx[i - 1, n - 1, sl] = True
                    tx_labels[i - 1].add(label)
                for j in R:
                    rx[j - 1, n - 1, sl] = True
                    rx_labels[j - 1].add(label)
                start += size
    return CentralizedPlacement(
        cfg=cfg,
        realization=CachingRealization(tx, rx),
        subfile_index=index,
        tx_caches=tuple(frozenset(x) for x in tx_labels),
        rx_caches=tuple(frozenset(x) for x in rx_labels),
    )


def centralized_schedule(placement: CentralizedPlacement, demands, alpha: Real | None = None
                         ) -> DeliverySchedule:
    """Schedule both subchannels for the given demands.

    P-blocks pack each receiver's missing packets, taken in subfile order,
    into groups of min(t+s, K_R) distinct receivers. N-blocks are the
    coded-multicast groups: for every transmitter subset T and every set S
    of s+1 receivers, receiver j in S gets the packets of W_{d_j,T,S-{j}}.
    """
    cfg = placement.cfg if alpha is None else placement.cfg.with_alpha(alpha)
    d: DemandVector = check_demands(demands, cfg.num_rx, cfg.num_files)
    t, s, kr = as_int(cfg.tx_load), as_int(cfg.rx_load), cfg.num_rx
    cap_p, cap_n = min(t + s, kr), min(1 + s, kr)
    real = placement.realization

    queues = {}
    for j, n in enumerate(d, start=1):
        missing = np.flatnonzero(~real.rx_mask[j - 1, n - 1]) + 1
        queues[j] = [PacketId(n, int(f)) for f in missing]
    p_blocks = tuple(
        Block("P", tuple(Delivery(j, pkt) for j, pkt in blk), ("P",), cap_p)
        for blk in pack_distinct(queues, cap_p)
    )

    n_blocks = []
    if s < kr:
        size = placement.subfile_size
        for S in combinations(range(1, kr + 1), s + 1):
            for T in combinations(range(1, cfg.num_tx + 1), t):
                ranges = [(j, placement.subfile_index[(d.file_of(j), T,
                                                      tuple(x for x in S if x != j))])
                          for j in S]
                for k in range(size):
                    n_blocks.append(Block(
                        "N",
                        tuple(Delivery(j, PacketId(d.file_of(j), rng[k])) for j, rng in ranges),
                        (T, S), cap_n))

    delivered = sum(len(b) for b in p_blocks)
    return DeliverySchedule(q=splitting_ratio_centralized(cfg), p_blocks=p_blocks,
                            n_blocks=tuple(n_blocks), delivered=delivered,
                            meta={"scheme": "centralized"})
