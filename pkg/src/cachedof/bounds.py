"""Converse bound, gap certification, block feasibility and the exact block-count oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .centralized import dof_centralized, dof_centralized_array
from .decentralized import dof_decentralized, dof_decentralized_array
from .model import (
    Block,
    CachingRealization,
    Delivery,
    GapViolated,
    InstanceTooLarge,
    NetworkConfig,
    Real,
    UnservablePacket,
    check_demands,
    exact,
    validate_config,
)

GAP_TOL = 1e-9


def dof_upper_bound(cfg: NetworkConfig) -> Real:
    kr = exact(cfg.num_rx)
    mu = exact(cfg.mu_r)
    a = exact(cfg.alpha)
    if mu == 1:
        return kr
    t, s = exact(cfg.tx_load), exact(cfg.rx_load)
    return a * min((t + s) / (1 - mu), kr) + (1 - a) * min((1 + s) / (1 - mu), kr)


def dof_upper_bound_array(kt, kr, mut, mur, alpha) -> np.ndarray:
    kt, kr, mut, mur, alpha = np.broadcast_arrays(*map(np.asarray, (kt, kr, mut, mur, alpha)))
    kr = kr.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        free = 1.0 - mur
        p = np.where(free > 0, (kt * mut + kr * mur) / free, np.inf)
        n = np.where(free > 0, (1 + kr * mur) / free, np.inf)
    return alpha * np.minimum(p, kr) + (1 - alpha) * np.minimum(n, kr)


@dataclass(frozen=True)
class DofReport:
    achievable: Real
    upper: Real
    ratio: Real
    scheme: str
    config: NetworkConfig


def _gap(cfg: NetworkConfig, scheme: str, limit: int) -> DofReport:
    validate_config(cfg, "formula")
    ach = dof_centralized(cfg) if scheme == "centralized" else dof_decentralized(cfg)
    up = dof_upper_bound(cfg)
    ratio = up / ach
    if ratio > limit + GAP_TOL:
        raise GapViolated(f"{scheme} gap {float(ratio):.12g} exceeds {limit} at {cfg}")
    return DofReport(ach, up, ratio, scheme, cfg)


def gap_centralized(cfg: NetworkConfig) -> DofReport:
    return _gap(cfg, "centralized", 2)


def gap_decentralized(cfg: NetworkConfig) -> DofReport:
    return _gap(cfg, "decentralized", 3)


# ------------------------------------------------------------------ grids

DEFAULT_SIZES = (1, 2, 4, 8, 16, 32)
DEFAULT_ALPHAS = tuple(Fraction(k, 10) for k in range(11))


@dataclass(frozen=True)
class ConfigGrid:
    """Flat arrays describing a set of formula-mode configurations."""

    kt: np.ndarray
    kr: np.ndarray
    mut: np.ndarray
    mur: np.ndarray
    alpha: np.ndarray

    def __len__(self) -> int:
        return len(self.kt)

    def config(self, i: int) -> NetworkConfig:
        return NetworkConfig(int(self.kt[i]), int(self.kr[i]), int(self.kr[i]), 1,
                             Fraction(self.mut[i]).limit_denominator(1 << 20),
                             Fraction(self.mur[i]).limit_denominator(1 << 20),
                             Fraction(self.alpha[i]).limit_denominator(1 << 20))

    def configs(self) -> Iterable[NetworkConfig]:
        return (self.config(i) for i in range(len(self)))

    @classmethod
    def from_configs(cls, cfgs: Iterable[NetworkConfig]) -> "ConfigGrid":
        cfgs = list(cfgs)
        return cls(np.array([c.num_tx for c in cfgs], dtype=np.int64),
                   np.array([c.num_rx for c in cfgs], dtype=np.int64),
                   np.array([float(c.mu_t) for c in cfgs]),
                   np.array([float(c.mu_r) for c in cfgs]),
                   np.array([float(c.alpha) for c in cfgs]))


def default_grid(sizes: Sequence[int] = DEFAULT_SIZES, kr_max: int | None = None,
                 mu_steps: int = 16, alphas: Sequence[Real] = DEFAULT_ALPHAS) -> ConfigGrid:
    """All (K_T, K_R, mu_T, mu_R, alpha) combinations with K_T mu_T >= 1; N = K_R."""
    mus = np.arange(mu_steps + 1) / mu_steps
    krs = [k for k in sizes if kr_max is None or k <= kr_max]
    rows = []
    for kt in sizes:
        for mut in mus:
            if kt * mut < 1 - 1e-12:
                continue
            for kr in krs:
                for mur in mus:
                    for a in alphas:
                        rows.append((kt, kr, mut, mur, float(a)))
    arr = np.array(rows)
    return ConfigGrid(arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64),
                      arr[:, 2], arr[:, 3], arr[:, 4])


@dataclass(frozen=True)
class GapSweep:
    points: int
    max_centralized_gap: float
    argmax_centralized: NetworkConfig
    max_decentralized_gap: float
    argmax_decentralized: NetworkConfig
    max_cen_over_dec: float
    argmax_cen_over_dec: NetworkConfig
    sandwich_violations: int
    min_ratio: float

    @property
    def passed(self) -> bool:
        return (self.max_centralized_gap <= 2 + GAP_TOL and self.max_decentralized_gap <= 3 + GAP_TOL
                and self.max_cen_over_dec <= 1.5 + GAP_TOL and self.sandwich_violations == 0
                and self.min_ratio >= 1 - 1e-12)


def grid_dofs(grid: ConfigGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    args = (grid.kt, grid.kr, grid.mut, grid.mur, grid.alpha)
    return dof_centralized_array(*args), dof_decentralized_array(*args), dof_upper_bound_array(*args)


def sweep_gaps(grid: ConfigGrid | None = None) -> GapSweep:
    grid = default_grid() if grid is None else grid
    cen, dec, up = grid_dofs(grid)
    g_c = up / cen
    g_d = up / dec
    c_d = cen / dec
    rel = 1e-12
    bad = int(np.sum(dec > cen * (1 + rel)) + np.sum(cen > up * (1 + rel)))
    ic, id_, icd = int(np.argmax(g_c)), int(np.argmax(g_d)), int(np.argmax(c_d))
    return GapSweep(len(grid), float(g_c[ic]), grid.config(ic), float(g_d[id_]), grid.config(id_),
                    float(c_d[icd]), grid.config(icd), bad, float(min(g_c.min(), g_d.min())))


def centralized_vs_decentralized_ratio(grid) -> tuple[float, NetworkConfig]:
    """Largest dof_centralized / dof_decentralized over ``grid`` and where it occurs."""
    if not isinstance(grid, ConfigGrid):
        grid = ConfigGrid.from_configs(grid)
    cen, dec, _ = grid_dofs(grid)
    ratio = cen / dec
    i = int(np.argmax(ratio))
    return float(ratio[i]), grid.config(i)


# ------------------------------------------------------------ feasibility

@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    witness: Delivery | None = None
    limit: int | None = None

    def __bool__(self):
        return self.feasible


def packet_capacity(side: str, tx_count: int, rx_count: int) -> int:
    """Largest block a packet can sit in, given how many caches hold it."""
    return tx_count + rx_count if side == "P" else rx_count + 1


def check_block_feasibility(block: Block | Sequence[Delivery], realization: CachingRealization,
                            side: str | None = None) -> Feasibility:
    """Test the per-block decodability conditions.

    A P-block of size L needs L <= |R_l| + |T_l| for every packet l in it,
    an N-block needs L <= |R_l| + 1. Targets must be distinct receivers.
    The first offending delivery is returned as witness.
    """
    if isinstance(block, Block):
        side = block.side if side is None else side
        deliveries = block.deliveries
    else:
        deliveries = tuple(block)
    if side not in ("P", "N"):
        raise ValueError("side must be 'P' or 'N'")
    size = len(deliveries)
    seen = set()
    limit = None
    witness = None
    for d in deliveries:
        tx = len(realization.tx_holders(d.packet))
        if tx == 0:
            raise UnservablePacket(f"packet {tuple(d.packet)} is stored by no transmitter")
        cap = packet_capacity(side, tx, len(realization.rx_holders(d.packet)))
        if limit is None or cap < limit:
            limit = cap
            if size > cap:
                witness = d
        if d.receiver in seen and witness is None:
            witness = d
        seen.add(d.receiver)
    if witness is not None:
        return Feasibility(False, witness, limit)
    return Feasibility(True, None, limit)


# ----------------------------------------------------------------- oracle

def _min_partition(receivers: Sequence[int], caps: Sequence[int]) -> tuple[int, list[list[int]]]:
    """Fewest blocks covering all items; items interact only through (receiver, cap).

    Items with the same (receiver, cap) are interchangeable, so the search
    runs over count vectors of these classes. The lowest nonempty class
    anchors each new block; the branch-and-bound lower bound is
    max(ceil(sum 1/cap), largest per-receiver count).
    """
    classes = sorted(set(zip(receivers, caps)))
    members = {c: [i for i, key in enumerate(zip(receivers, caps)) if key == c] for c in classes}
    cls_rx = [c[0] for c in classes]
    cls_cap = [c[1] for c in classes]
    rx_ids = sorted(set(cls_rx))
    start = tuple(len(members[c]) for c in classes)

    def lower(state) -> int:
        if not any(state):
            return 0
        frac = sum(Fraction(n, cls_cap[k]) for k, n in enumerate(state) if n)
        per_rx = max(sum(n for k, n in enumerate(state) if cls_rx[k] == r) for r in rx_ids)
        return max(math.ceil(frac), per_rx)

    def blocks_from(state, anchor):
        """Feasible blocks containing one item of class ``anchor``, largest first."""
        out = []

        def grow(k, chosen, used_rx, cap):
            if k == len(classes):
                out.append(tuple(chosen))
                return
            if state[k] and cls_rx[k] not in used_rx and len(chosen) + 1 <= min(cap, cls_cap[k]):
                grow(k + 1, chosen + [k], used_rx | {cls_rx[k]}, min(cap, cls_cap[k]))
            grow(k + 1, chosen, used_rx, cap)

        grow(anchor + 1, [anchor], {cls_rx[anchor]}, cls_cap[anchor])
        out.sort(key=len, reverse=True)
        return out

    @lru_cache(maxsize=None)
    def solve(state) -> tuple[int, tuple]:
        if not any(state):
            return 0, ()
        anchor = next(k for k, n in enumerate(state) if n)
        best, best_plan = math.inf, ()
        for blk in blocks_from(state, anchor):
            rest = list(state)
            for k in blk:
                rest[k] -= 1
            rest = tuple(rest)
            if 1 + lower(rest) >= best:
                continue
            n, plan = solve(rest)
            if 1 + n < best:
                best, best_plan = 1 + n, (blk,) + plan
            if best == lower(state):
                break
        return best, best_plan

    count, plan = solve(start)
    pools = {c: list(members[c]) for c in classes}
    partition = [[pools[classes[k]].pop(0) for k in blk] for blk in plan]
    return count, partition


def optimal_split(hp: int, hn: int, alpha: Real) -> tuple[Real, Real]:
    """(q*, load) minimizing max{(q/alpha) hp, ((1-q)/(1-alpha)) hn} over q in [0, 1]."""
    a = exact(alpha)
    hp, hn = exact(hp), exact(hn)
    if hp == 0 and hn == 0:
        return a, 0 * a
    if a == 0:
        return 0 * a, hn
    if a == 1:
        return 0 * a + 1, hp
    denom = (1 - a) * hp + a * hn
    return a * hn / denom, hp * hn / denom


@dataclass(frozen=True)
class OracleResult:
    p_blocks: int
    n_blocks: int
    q: Real
    max_load: Real
    p_partition: tuple = field(default=(), repr=False)
    n_partition: tuple = field(default=(), repr=False)


def bruteforce_min_blocks(realization: CachingRealization, demands, alpha: Real,
                          max_items: int = 16) -> OracleResult:
    """Exact minimum number of feasible P- and N-blocks for one demand vector."""
    d = check_demands(demands, realization.num_rx, realization.num_files)
    items = realization.uncached_demands(d)
    if len(items) > max_items:
        raise InstanceTooLarge(f"{len(items)} demanded subpackets per side exceeds {max_items}")
    receivers, tx_c, rx_c = [], [], []
    for j, pkt in items:
        tx = len(realization.tx_holders(pkt))
        if tx == 0:
            raise UnservablePacket(f"packet {tuple(pkt)} is stored by no transmitter")
        receivers.append(j)
        tx_c.append(tx)
        rx_c.append(len(realization.rx_holders(pkt)))
    out = {}
    for side in ("P", "N"):
        caps = [packet_capacity(side, a, b) for a, b in zip(tx_c, rx_c)]
        n, part = _min_partition(receivers, caps)
        out[side] = (n, tuple(tuple(Delivery(*items[i]) for i in blk) for blk in part))
    q, load = optimal_split(out["P"][0], out["N"][0], alpha)
    return OracleResult(out["P"][0], out["N"][0], q, load, out["P"][1], out["N"][1])


# --------------------------------------------------------------- counting

@dataclass(frozen=True)
class CountingReport:
    w: np.ndarray  # (K_T, K_R); w[i-1, j]
    receiver_lhs: Fraction
    receiver_rhs: Fraction
    library_lhs: Fraction
    library_rhs: int
    demand_mass: int
    demand_floor: Fraction
    n_side_average: Fraction
    n_side_floor: Fraction
    uncovered: int

    @property
    def receiver_ok(self) -> bool:
        return self.receiver_lhs <= self.receiver_rhs

    @property
    def library_ok(self) -> bool:
        return self.library_lhs <= self.library_rhs

    @property
    def library_tight(self) -> bool:
        return self.library_lhs == self.library_rhs

    @property
    def holds(self) -> bool:
        return (self.uncovered == 0 and self.receiver_ok and self.library_ok
                and self.demand_mass >= self.demand_floor
                and self.n_side_average >= self.n_side_floor)

    def __bool__(self):
        return self.holds


def verify_counting_bounds(realization, mu_r: Real | None = None) -> CountingReport:
    """Build w_{i,j} from a realization and check the memory accounting.

    Checked: the receiver-size and library-size inequalities, the total
    demand mass sum w >= K_R N (1 - mu_R) F, and the averaged N-side block
    bound (1/N) sum w/(j+1) >= K_R F (1 - mu_R)^2 / (1 + K_R mu_R).
    ``realization`` may also be a placement object, whose cfg supplies mu_R;
    otherwise the fullest receiver cache defines it.
    """
    if hasattr(realization, "realization"):
        if mu_r is None:
            mu_r = realization.cfg.mu_r
        realization = realization.realization
    kt, kr = realization.num_tx, realization.num_rx
    nfiles, F = realization.num_files, realization.packets_per_file
    library = nfiles * F
    if mu_r is None:
        mu_r = Fraction(int(realization.rx_mask.sum(axis=(1, 2)).max()), library)
    mu = Fraction(mu_r).limit_denominator(1 << 30) if isinstance(mu_r, float) else Fraction(mu_r)

    ti = realization.tx_mask.sum(axis=0).ravel()
    rj = realization.rx_mask.sum(axis=0).ravel()
    counts = np.zeros((kt + 1, kr + 1), dtype=np.int64)
    np.add.at(counts, (ti, rj), 1)
    uncovered = int(counts[0].sum())
    w = np.zeros((kt, kr), dtype=np.int64)
    for j in range(kr):
        w[:, j] = (kr - j) * counts[1:, j]

    rec = sum(Fraction(j * int(w[:, j].sum()), kr - j) for j in range(kr))
    lib = sum(Fraction(int(w[:, j].sum()), kr - j) for j in range(kr))
    mass = int(w.sum())
    n_avg = sum(Fraction(int(w[:, j].sum()), j + 1) for j in range(kr)) / nfiles
    return CountingReport(
        w=w,
        receiver_lhs=rec,
        receiver_rhs=kr * mu * library,
        library_lhs=lib,
        library_rhs=library,
        demand_mass=mass,
        demand_floor=kr * nfiles * (1 - mu) * F,
        n_side_average=n_avg,
        n_side_floor=kr * F * (1 - mu) ** 2 / (1 + kr * mu),
        uncovered=uncovered,
    )
