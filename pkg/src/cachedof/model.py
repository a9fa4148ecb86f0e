"""Network configuration, packet indexing and delivery-time accounting.

Everything is 1-based at the public surface (transmitters, receivers, files,
packet indices) and 0-based inside the numpy masks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

Real = Union[int, float, Fraction]

_INT_TOL = 1e-9


class CacheDofError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CacheDofError, ValueError):
    pass


class LibraryUncoverable(ConfigError):
    pass


class NonIntegerCache(ConfigError):
    pass


class TooFewFiles(ConfigError):
    pass


class RepeatedDemand(ConfigError):
    pass


class NonIntegerCacheCount(ConfigError):
    pass


class IndivisibleF(ConfigError):
    def __init__(self, message: str, smallest_valid: int):
        super().__init__(message)
        self.smallest_valid = smallest_valid


class UndefinedDuration(CacheDofError, ValueError):
    pass


class UnservablePacket(CacheDofError, ValueError):
    pass


class InstanceTooLarge(CacheDofError, RuntimeError):
    pass


class DomainError(CacheDofError, ValueError):
    pass


class GapViolated(CacheDofError, AssertionError):
    pass


def is_integral(x: Real) -> bool:
    if isinstance(x, (int, np.integer)):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return abs(x - round(x)) < _INT_TOL


def as_int(x: Real) -> int:
    if not is_integral(x):
        raise ValueError(f"{x} is not an integer")
    return int(round(x))


def exact(x: Real) -> Real:
    """Promote ints to Fraction so that arithmetic stays rational."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return Fraction(int(x))
    return x


@dataclass(frozen=True)
class NetworkConfig:
    num_tx: int
    num_rx: int
    num_files: int
    packets_per_file: int
    mu_t: Real
    mu_r: Real
    alpha: Real = 1

    def __post_init__(self):
        for name in ("num_tx", "num_rx", "num_files", "packets_per_file"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        for name in ("mu_t", "mu_r", "alpha"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def alpha_bar(self) -> Real:
        return 1 - self.alpha

    @property
    def tx_load(self) -> Real:
        """Number of transmitters holding each packet, K_T * mu_T."""
        return self.num_tx * self.mu_t

    @property
    def rx_load(self) -> Real:
        """Aggregate receiver memory in files, K_R * mu_R."""
        return self.num_rx * self.mu_r

    def with_alpha(self, alpha: Real) -> "NetworkConfig":
        return replace(self, alpha=alpha)

    def with_mu_r(self, mu_r: Real) -> "NetworkConfig":
        return replace(self, mu_r=mu_r)


def validate_config(cfg: NetworkConfig, mode: str = "formula",
                    scheme: str = "centralized", demands: bool = True) -> NetworkConfig:
    """Check the model invariants for ``mode`` ("formula" or "scheduler").

    In scheduler mode the transmitter load must be an integer for both
    schemes and the receiver load must be an integer for the centralized one.
    ``demands=False`` skips N >= K_R, which only distinct demands need.
    """
    if mode not in ("formula", "scheduler"):
        raise ValueError(f"unknown mode {mode!r}")
    if scheme not in ("centralized", "decentralized"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if mode == "scheduler":
        if not is_integral(cfg.tx_load):
            raise NonIntegerCache(f"K_T*mu_T = {cfg.tx_load} is not an integer")
        if scheme == "centralized" and not is_integral(cfg.rx_load):
            raise NonIntegerCache(f"K_R*mu_R = {cfg.rx_load} is not an integer")
    if cfg.tx_load < 1 - _INT_TOL:
        raise LibraryUncoverable(
            f"K_T*mu_T = {cfg.tx_load} < 1: transmitters cannot hold the whole library")
    if demands and cfg.num_files < cfg.num_rx:
        raise TooFewFiles(f"N = {cfg.num_files} < K_R = {cfg.num_rx}")
    return cfg


class PacketId(NamedTuple):
    file: int
    index: int


@dataclass(frozen=True)
class DemandVector:
    demands: tuple[int, ...]

    def __iter__(self):
        return iter(self.demands)

    def __len__(self):
        return len(self.demands)

    def __getitem__(self, j: int) -> int:
        return self.demands[j]

    def file_of(self, receiver: int) -> int:
        """Demanded file of a 1-based receiver."""
        return self.demands[receiver - 1]


def worst_case_demands(cfg: NetworkConfig) -> DemandVector:
    if cfg.num_files < cfg.num_rx:
        raise TooFewFiles(f"N = {cfg.num_files} < K_R = {cfg.num_rx}")
    return DemandVector(tuple(range(1, cfg.num_rx + 1)))


def check_demands(demands: Sequence[int] | DemandVector, num_rx: int,
                  num_files: int) -> DemandVector:
    d = demands if isinstance(demands, DemandVector) else DemandVector(tuple(demands))
    if len(d) != num_rx:
        raise ConfigError(f"expected {num_rx} demands, got {len(d)}")
    if any(not 1 <= n <= num_files for n in d):
        raise ConfigError(f"demands {d.demands} outside [1, {num_files}]")
    if len(set(d.demands)) != len(d):
        raise RepeatedDemand(f"worst-case demands must be distinct, got {d.demands}")
    return d


@dataclass(frozen=True)
class DeliveryAccounting:
    q: Real
    p_blocks: int
    n_blocks: int
    delivered: int


def _side_time(share: Real, weight: Real, blocks: int, label: str) -> Real:
    if blocks == 0 or share == 0:
        return 0
    if weight == 0:
        raise UndefinedDuration(
            f"{label}-side carries traffic over {blocks} blocks but has zero bandwidth")
    return exact(share) / exact(weight) * blocks


def delivery_time(acct: DeliveryAccounting, alpha: Real) -> Real:
    """Time-slots needed by both subchannels running in parallel."""
    t_p = _side_time(acct.q, alpha, acct.p_blocks, "P")
    t_n = _side_time(1 - acct.q, 1 - alpha, acct.n_blocks, "N")
    return max(t_p, t_n)


def sum_dof(acct: DeliveryAccounting, alpha: Real) -> Real | None:
    """Delivered packets per time-slot; None when nothing had to be sent."""
    h = delivery_time(acct, alpha)
    if h == 0:
        return None
    return exact(acct.delivered) / h


class CachingRealization:
    """Packet-level cache contents of every transmitter and receiver.

    ``tx_mask[i, n, f]`` is True when transmitter i+1 stores packet f+1 of
    file n+1; ``rx_mask`` is the receiver analogue.
    """

    def __init__(self, tx_mask: np.ndarray, rx_mask: np.ndarray):
        tx_mask = np.asarray(tx_mask, dtype=bool)
        rx_mask = np.asarray(rx_mask, dtype=bool)
        if tx_mask.ndim != 3 or rx_mask.ndim != 3 or tx_mask.shape[1:] != rx_mask.shape[1:]:
            raise ValueError("masks must be (K_T, N, F) and (K_R, N, F)")
        tx_mask.setflags(write=False)
        rx_mask.setflags(write=False)
        self.tx_mask = tx_mask
        self.rx_mask = rx_mask

    @classmethod
    def from_holders(cls, num_tx: int, num_rx: int, num_files: int, packets_per_file: int,
                     tx_holders: dict, rx_holders: dict | None = None) -> "CachingRealization":
        """Build from {PacketId: iterable of 1-based holders} maps."""
        tx = np.zeros((num_tx, num_files, packets_per_file), dtype=bool)
        rx = np.zeros((num_rx, num_files, packets_per_file), dtype=bool)
        for pkt, holders in tx_holders.items():
            for i in holders:
                tx[i - 1, pkt[0] - 1, pkt[1] - 1] = True
        for pkt, holders in (rx_holders or {}).items():
            for j in holders:
                rx[j - 1, pkt[0] - 1, pkt[1] - 1] = True
        return cls(tx, rx)

    @property
    def num_tx(self) -> int:
        return self.tx_mask.shape[0]

    @property
    def num_rx(self) -> int:
        return self.rx_mask.shape[0]

    @property
    def num_files(self) -> int:
        return self.tx_mask.shape[1]

    @property
    def packets_per_file(self) -> int:
        return self.tx_mask.shape[2]

    def tx_holders(self, pkt: PacketId) -> frozenset[int]:
        col = self.tx_mask[:, pkt[0] - 1, pkt[1] - 1]
        return frozenset(int(i) + 1 for i in np.flatnonzero(col))

    def rx_holders(self, pkt: PacketId) -> frozenset[int]:
        col = self.rx_mask[:, pkt[0] - 1, pkt[1] - 1]
        return frozenset(int(j) + 1 for j in np.flatnonzero(col))

    def tx_cache(self, i: int) -> frozenset[PacketId]:
        n, f = np.nonzero(self.tx_mask[i - 1])
        return frozenset(PacketId(int(a) + 1, int(b) + 1) for a, b in zip(n, f))

    def rx_cache(self, j: int) -> frozenset[PacketId]:
        n, f = np.nonzero(self.rx_mask[j - 1])
        return frozenset(PacketId(int(a) + 1, int(b) + 1) for a, b in zip(n, f))

    def rx_cached_count(self) -> np.ndarray:
        """Number of receivers holding each packet, shape (N, F)."""
        return self.rx_mask.sum(axis=0)

    def uncached_demands(self, demands: DemandVector) -> list[tuple[int, PacketId]]:
        """(receiver, packet) pairs still to be delivered, sorted."""
        out = []
        for j, n in enumerate(demands, start=1):
            for f in np.flatnonzero(~self.rx_mask[j - 1, n - 1]):
                out.append((j, PacketId(n, int(f) + 1)))
        return out


class Delivery(NamedTuple):
    receiver: int
    packet: PacketId


@dataclass(frozen=True)
class Block:
    """Subpackets sent together on one subchannel, one per distinct receiver."""

    side: str
    deliveries: tuple[Delivery, ...]
    group: tuple = ()
    capacity: int = 0

    def __len__(self):
        return len(self.deliveries)

    @property
    def receivers(self) -> tuple[int, ...]:
        return tuple(d.receiver for d in self.deliveries)


@dataclass(frozen=True)
class DeliverySchedule:
    q: Real
    p_blocks: tuple[Block, ...]
    n_blocks: tuple[Block, ...]
    delivered: int
    meta: dict = field(default_factory=dict, compare=False)

    def accounting(self) -> DeliveryAccounting:
        return DeliveryAccounting(self.q, len(self.p_blocks), len(self.n_blocks), self.delivered)

    def delivery_time(self, alpha: Real) -> Real:
        return delivery_time(self.accounting(), alpha)

    def realized_dof(self, alpha: Real) -> Real | None:
        return sum_dof(self.accounting(), alpha)

    def blocks(self, side: str) -> tuple[Block, ...]:
        return self.p_blocks if side == "P" else self.n_blocks

    def partial_block_slack(self, side: str) -> int:
        """Blocks beyond the number of full blocks each scheduling group could fill.

        A group holding n subpackets at capacity c is charged
        (its block count) - floor(n / c).
        """
        used: dict = {}
        items: dict = {}
        cap: dict = {}
        for b in self.blocks(side):
            used[b.group] = used.get(b.group, 0) + 1
            items[b.group] = items.get(b.group, 0) + len(b)
            cap[b.group] = b.capacity
        return sum(used[g] - items[g] // cap[g] for g in used)


def pack_distinct(queues: dict[int, list], capacity: int) -> list[list[tuple[int, object]]]:
    """Pack per-receiver queues into blocks of at most ``capacity`` distinct receivers.

    Each block takes the head of the ``capacity`` longest remaining queues
    (ties go to the lower receiver index). This reaches
    max(ceil(total / capacity), longest queue) blocks, which is optimal.
    """
    if capacity < 1:
        raise ValueError("capacity must be positive")
    heads = {j: 0 for j, q in queues.items() if q}
    blocks = []
    while heads:
        order = sorted(heads, key=lambda j: (-(len(queues[j]) - heads[j]), j))[:capacity]
        block = []
        for j in sorted(order):
            block.append((j, queues[j][heads[j]]))
            heads[j] += 1
            if heads[j] == len(queues[j]):
                del heads[j]
        blocks.append(block)
    return blocks


def coverage_violations(schedule: DeliverySchedule, realization: CachingRealization,
                        demands: DemandVector) -> list[tuple[str, int, PacketId, str]]:
    """Demanded packets neither cached nor delivered, plus stray or repeated deliveries."""
    bad = []
    F = realization.packets_per_file
    for side in ("P", "N"):
        got: dict[int, list[PacketId]] = {j: [] for j in range(1, len(demands) + 1)}
        for b in schedule.blocks(side):
            for d in b.deliveries:
                got[d.receiver].append(d.packet)
        for j, n in enumerate(demands, start=1):
            cached = realization.rx_mask[j - 1, n - 1]
            seen = set()
            for pkt in got[j]:
                if pkt.file != n or cached[pkt.index - 1] or pkt in seen:
                    bad.append((side, j, pkt, "unneeded"))
                seen.add(pkt)
            for f in range(1, F + 1):
                if not cached[f - 1] and PacketId(n, f) not in seen:
                    bad.append((side, j, PacketId(n, f), "missing"))
    return bad


def binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0
