"""Random receiver placement with sub-phase delivery.

Transmitters keep the structured split over transmitter subsets; every
receiver independently stores a uniformly random mu_R*F packets of each
file. Delivery on the P side runs one sub-phase per number l of receivers
already holding a packet, with blocks of min(K_T mu_T + l, K_R) receivers.
The N side is coded multicasting over receiver groups of size l + 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels
from ._parallel import ordered_map
from .model import (
    Block,
    CachingRealization,
    DeliveryAccounting,
    Delivery,
    DeliverySchedule,
    IndivisibleF,
    NetworkConfig,
    NonIntegerCacheCount,
    PacketId,
    Real,
    as_int,
    binom,
    check_demands,
    delivery_time,
    exact,
    is_integral,
    pack_distinct,
    validate_config,
    worst_case_demands,
)


def _leg_sum(cfg: NetworkConfig, r: Real) -> Real:
    kr = cfg.num_rx
    mu = exact(cfg.mu_r)
    return sum(binom(kr - 1, l) * mu ** l * (1 - mu) ** (kr - 1 - l) / min(r + l, kr)
               for l in range(kr))


def dof_legs_decentralized(cfg: NetworkConfig) -> tuple[Real, Real]:
    """DoF with only the P-subchannel (alpha=1) and only the N-subchannel (alpha=0)."""
    return 1 / _leg_sum(cfg, exact(cfg.tx_load)), 1 / _leg_sum(cfg, 1)


def dof_decentralized(cfg: NetworkConfig) -> Real:
    p, n = dof_legs_decentralized(cfg)
    a = exact(cfg.alpha)
    return a * p + (1 - a) * n


def splitting_ratio_decentralized(cfg: NetworkConfig) -> Real:
    p, n = dof_legs_decentralized(cfg)
    a = exact(cfg.alpha)
    return a * p / (a * p + (1 - a) * n)


def delivery_time_decentralized(cfg: NetworkConfig) -> Real:
    return cfg.num_rx * (1 - exact(cfg.mu_r)) / dof_decentralized(cfg)


def expected_blocks_decentralized(cfg: NetworkConfig) -> tuple[Real, Real]:
    """Expected (P-blocks, N-blocks) per packet of file size, as F grows."""
    kr = cfg.num_rx
    mu = exact(cfg.mu_r)
    t = exact(cfg.tx_load)
    w = [binom(kr - 1, l) * mu ** l * (1 - mu) ** (kr - l) for l in range(kr)]
    hp = kr * sum(w[l] / min(t + l, kr) for l in range(kr))
    hn = kr * sum(w[l] / (1 + l) for l in range(kr))
    return hp, hn


def dof_decentralized_array(kt, kr, mut, mur, alpha) -> np.ndarray:
    kt, kr, mut, mur, alpha = np.broadcast_arrays(*map(np.asarray, (kt, kr, mut, mur, alpha)))
    kr_flat = kr.ravel().astype(np.int64)
    mu = mur.ravel().astype(float)
    sp = _kernels.leg_sums(kr_flat, mu, (kt * mut).ravel().astype(float))
    sn = _kernels.leg_sums(kr_flat, mu, np.ones_like(mu))
    out = alpha.ravel() / sp + (1 - alpha.ravel()) / sn
    return out.reshape(kr.shape)


@dataclass(frozen=True)
class DecentralizedPlacement:
    cfg: NetworkConfig
    realization: CachingRealization
    subfile_index: dict  # (n, T) -> range of 1-based packet indices
    tx_caches: tuple[frozenset, ...]
    seed: int

    @property
    def rx_caches(self) -> tuple[dict, ...]:
        """Per receiver: {file: frozenset of cached 1-based packet indices}."""
        rx = self.realization.rx_mask
        return tuple(
            {n + 1: frozenset((np.flatnonzero(rx[j, n]) + 1).tolist()) for n in range(rx.shape[1])}
            for j in range(rx.shape[0]))


def receiver_rng(seed: int, receiver: int, file: int) -> np.random.Generator:
    """Independent stream for one (receiver, file) pair, whatever the visiting order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(receiver, file)))


def decentralized_place(cfg: NetworkConfig, seed: int) -> DecentralizedPlacement:
    validate_config(cfg, "scheduler", "decentralized", demands=False)
    F = cfg.packets_per_file
    stored = cfg.mu_r * F
    if not is_integral(stored):
        raise NonIntegerCacheCount(f"mu_R*F = {stored} is not an integer")
    stored = as_int(stored)
    t = as_int(cfg.tx_load)
    parts = binom(cfg.num_tx, t)
    if F % parts:
        raise IndivisibleF(
            f"F = {F} is not a multiple of the {parts} transmitter subfiles", smallest_valid=parts)
    size = F // parts

    tx = np.zeros((cfg.num_tx, cfg.num_files, F), dtype=bool)
    index = {}
    labels = [set() for _ in range(cfg.num_tx)]
    for n in range(1, cfg.num_files + 1):
        for k, T in enumerate(combinations(range(1, cfg.num_tx + 1), t)):
            index[(n, T)] = range(1 + k * size, 1 + (k + 1) * size)
            for i in T:
                tx[i - 1, n - 1, k * size:(k + 1) * size] = True
                labels[i - 1].add((n, T))

    rx = np.zeros((cfg.num_rx, cfg.num_files, F), dtype=bool)
    if stored:
        for j in range(1, cfg.num_rx + 1):
            for n in range(1, cfg.num_files + 1):
                picked = receiver_rng(seed, j, n).choice(F, size=stored, replace=False)
                rx[j - 1, n - 1, picked] = True
    return DecentralizedPlacement(cfg, CachingRealization(tx, rx), index,
                                  tuple(frozenset(x) for x in labels), int(seed))


def _holder_codes(rx_mask: np.ndarray, file: int) -> np.ndarray:
    weights = 1 << np.arange(rx_mask.shape[0], dtype=np.int64)
    return weights @ rx_mask[:, file - 1, :].astype(np.int64)


def _bits(code: int) -> int:
    return bin(code).count("1")


@dataclass(frozen=True)
class SubPhasePlan:
    """P-side work split by the number l of receivers already holding a packet."""

    pairs: dict  # l -> list of (receiver, PacketId)
    capacities: dict  # l -> block capacity


def sub_phase_plan(placement: DecentralizedPlacement, demands) -> SubPhasePlan:
    cfg = placement.cfg
    d = check_demands(demands, cfg.num_rx, cfg.num_files)
    t, kr = as_int(cfg.tx_load), cfg.num_rx
    pairs = {l: [] for l in range(kr)}
    for j, n in enumerate(d, start=1):
        codes = _holder_codes(placement.realization.rx_mask, n)
        for f in range(len(codes)):
            c = int(codes[f])
            if not c >> (j - 1) & 1:
                pairs[_bits(c)].append((j, PacketId(n, f + 1)))
    return SubPhasePlan(pairs, {l: min(t + l, kr) for l in range(kr)})


def decentralized_schedule(placement: DecentralizedPlacement, demands,
                           alpha: Real | None = None) -> DeliverySchedule:
    cfg = placement.cfg if alpha is None else placement.cfg.with_alpha(alpha)
    d = check_demands(demands, cfg.num_rx, cfg.num_files)
    kr = cfg.num_rx
    plan = sub_phase_plan(placement, d)

    p_blocks = []
    for l in range(kr):
        queues: dict[int, list] = {}
        for j, pkt in plan.pairs[l]:
            queues.setdefault(j, []).append(pkt)
        cap = plan.capacities[l]
        for blk in pack_distinct(queues, cap):
            p_blocks.append(Block("P", tuple(Delivery(j, pkt) for j, pkt in blk), ("P", l), cap))

    codes = {j: _holder_codes(placement.realization.rx_mask, n) for j, n in enumerate(d, start=1)}
    n_blocks = []
    for size in range(1, kr + 1):
        for S in combinations(range(1, kr + 1), size):
            lists = []
            for j in S:
                want = sum(1 << (x - 1) for x in S if x != j)
                idx = np.flatnonzero(codes[j] == want) + 1
                lists.append((j, [PacketId(d.file_of(j), int(f)) for f in idx]))
            depth = max(len(v) for _, v in lists)
            for k in range(depth):
                n_blocks.append(Block(
                    "N", tuple(Delivery(j, v[k]) for j, v in lists if k < len(v)), ("N", S), size))

    delivered = sum(len(b) for b in p_blocks)
    return DeliverySchedule(q=splitting_ratio_decentralized(cfg), p_blocks=tuple(p_blocks),
                            n_blocks=tuple(n_blocks), delivered=delivered,
                            meta={"scheme": "decentralized", "seed": placement.seed})


def decentralized_block_counts(placement: DecentralizedPlacement, demands) -> tuple[int, int, int]:
    """(P-blocks, N-blocks, delivered) of ``decentralized_schedule`` without building it."""
    cfg = placement.cfg
    d = check_demands(demands, cfg.num_rx, cfg.num_files)
    t, kr = as_int(cfg.tx_load), cfg.num_rx
    hist = _kernels.holder_histogram(placement.realization.rx_mask, d.demands)
    pop = np.array([_bits(c) for c in range(1 << kr)])
    own = (np.arange(1 << kr)[None, :] >> np.arange(kr)[:, None]) & 1
    missing = np.where(own == 0, hist, 0)

    hp = 0
    for l in range(kr):
        per_rx = missing[:, pop == l].sum(axis=1)
        total = int(per_rx.sum())
        if total:
            hp += max(-(-total // min(t + l, kr)), int(per_rx.max()))
    hn = 0
    for code in range(1, 1 << kr):
        members = [j for j in range(kr) if code >> j & 1]
        hn += max(int(hist[j, code & ~(1 << j)]) for j in members)
    return hp, hn, int(missing.sum())


def _trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class MonteCarloReport:
    formula: float
    empirical_mean: float
    stderr: float
    trials: int
    seed: int
    samples: tuple = field(repr=False, default=())
    cached_fraction_by_l: tuple = ()
    binomial_pmf: tuple = ()

    @property
    def relative_error(self) -> float:
        if self.formula == 0:
            return 0.0 if self.empirical_mean == 0 else math.inf
        return abs(self.empirical_mean - self.formula) / self.formula


def formula_delivery_time(cfg: NetworkConfig) -> float:
    """Expected delivery time in time-slots at the configured F and alpha."""
    return float(delivery_time_decentralized(cfg)) * cfg.packets_per_file


def montecarlo_delivery(cfg: NetworkConfig, seed: int, trials: int) -> MonteCarloReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    validate_config(cfg, "scheduler", "decentralized")
    demands = worst_case_demands(cfg)
    q = float(splitting_ratio_decentralized(cfg))
    alpha = float(cfg.alpha)
    kr = cfg.num_rx
    library = cfg.num_files * cfg.packets_per_file

    def one(trial: int):
        pl = decentralized_place(cfg, _trial_seed(seed, trial))
        hp, hn, delivered = decentralized_block_counts(pl, demands)
        h = delivery_time(DeliveryAccounting(q, hp, hn, delivered), alpha)
        hist = _kernels.cached_count_histogram(pl.realization.rx_mask)
        return float(h), hist / library

    results = ordered_map(one, range(trials))
    hs = np.array([h for h, _ in results])
    frac = np.mean([f for _, f in results], axis=0)
    mu = float(cfg.mu_r)
    pmf = [math.comb(kr, l) * mu ** l * (1 - mu) ** (kr - l) for l in range(kr + 1)]
    stderr = float(hs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloReport(
        formula=formula_delivery_time(cfg),
        empirical_mean=float(hs.mean()),
        stderr=stderr,
        trials=trials,
        seed=int(seed),
        samples=tuple(hs.tolist()),
        cached_fraction_by_l=tuple(float(x) for x in frac),
        binomial_pmf=tuple(pmf),
    )
