"""Command-line entry point: ``cachedof {dof,schedule,verify,tradeoff,montecarlo}``."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import analysis, bounds
from .centralized import centralized_place, centralized_schedule, dof_centralized, splitting_ratio_centralized
from .decentralized import (
    decentralized_block_counts,
    decentralized_place,
    decentralized_schedule,
    dof_decentralized,
    expected_blocks_decentralized,
    montecarlo_delivery,
    splitting_ratio_decentralized,
)
from .model import (
    ConfigError,
    InstanceTooLarge,
    NetworkConfig,
    check_demands,
    coverage_violations,
    validate_config,
    worst_case_demands,
)

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_TOO_LARGE = 3

JSON_DIGITS = 12
CSV_DIGITS = 9

TRADEOFF_HEADER = ("alpha_bar", "delta_r", "scheme", "kt", "kr", "mut", "mur")
DOF_FIELDS = ("kt", "kr", "n", "f", "mut", "mur", "alpha",
              "achievable_centralized", "achievable_decentralized", "upper",
              "ratio_centralized", "ratio_decentralized",
              "q_centralized", "q_decentralized")


class UsageError(Exception):
    pass


# ------------------------------------------------------------- formatting

def num(x, digits: int = JSON_DIGITS):
    """JSON-ready number: ints stay ints, everything else is rounded to ``digits`` significant digits."""
    if x is None:
        return None
    if isinstance(x, (int, np.integer)) or (isinstance(x, Fraction) and x.denominator == 1):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


def text(x, digits: int = CSV_DIGITS) -> str:
    if x is None:
        return "NA"
    if isinstance(x, (int, np.integer)) or (isinstance(x, Fraction) and x.denominator == 1):
        return str(int(x))
    return f"{float(x):.{digits}g}"


def dump_json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)


# ------------------------------------------------------------ sweep specs

def parse_values(raw: str, integer: bool = False) -> tuple:
    """``a,b,c`` or inclusive ``start:stop:step``; values parse as exact fractions."""
    raw = raw.strip()
    try:
        if ":" in raw:
            parts = [Fraction(p) for p in raw.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            start, stop, step = parts
            count = int((stop - start) / step) + 1
            vals = [start + i * step for i in range(max(count, 0))]
        else:
            vals = [Fraction(p) for p in raw.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse value list {raw!r}") from None
    if not vals:
        raise UsageError(f"empty value list {raw!r}")
    if integer:
        if any(v.denominator != 1 for v in vals):
            raise UsageError(f"expected integers in {raw!r}")
        return tuple(int(v) for v in vals)
    return tuple(vals)


@dataclass(frozen=True)
class SweepSpec:
    kt: tuple
    kr: tuple
    files: tuple | None  # None: one file per receiver
    f: tuple
    mut: tuple
    mur: tuple
    alpha: tuple
    scheme: str = "both"
    fmt: str = "json"

    @classmethod
    def from_args(cls, args) -> "SweepSpec":
        return cls(
            kt=parse_values(args.kt, integer=True),
            kr=parse_values(args.kr, integer=True),
            files=parse_values(args.n, integer=True) if args.n else None,
            f=parse_values(args.f, integer=True),
            mut=parse_values(args.mut),
            mur=parse_values(args.mur),
            alpha=parse_values(args.alpha),
            scheme=getattr(args, "scheme", "both"),
            fmt=getattr(args, "format", "json"),
        )

    def points(self) -> Iterator[NetworkConfig]:
        """Every combination, validated in formula mode; ConfigError propagates."""
        for kt, kr, f, mut, mur, a in itertools.product(self.kt, self.kr, self.f, self.mut,
                                                        self.mur, self.alpha):
            for n in (self.files or (kr,)):
                cfg = NetworkConfig(kt, kr, n, f, mut, mur, a)
                validate_config(cfg, "formula")
                yield cfg


def single(values: tuple, name: str):
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value here")
    return values[0]


def add_config_flags(p: argparse.ArgumentParser, **defaults) -> None:
    d = {"kt": "16", "kr": "16", "n": None, "f": "1", "mut": "1/2", "mur": "1/16", "alpha": "1"}
    d.update(defaults)
    p.add_argument("--kt", default=d["kt"], help="number of transmitters")
    p.add_argument("--kr", default=d["kr"], help="number of receivers")
    p.add_argument("--n", default=d["n"], help="library size in files (default: K_R)")
    p.add_argument("--f", default=d["f"], help="packets per file")
    p.add_argument("--mut", default=d["mut"], help="normalized transmitter cache size")
    p.add_argument("--mur", default=d["mur"], help="normalized receiver cache size")
    p.add_argument("--alpha", default=d["alpha"], help="bandwidth share of the perfect-CSIT subchannel")


def config_row(cfg: NetworkConfig) -> dict:
    return {"kt": cfg.num_tx, "kr": cfg.num_rx, "n": cfg.num_files, "f": cfg.packets_per_file,
            "mut": cfg.mu_t, "mur": cfg.mu_r, "alpha": cfg.alpha}


# -------------------------------------------------------------------- dof

def dof_row(cfg: NetworkConfig) -> dict:
    cen, dec, up = dof_centralized(cfg), dof_decentralized(cfg), bounds.dof_upper_bound(cfg)
    row = config_row(cfg)
    row.update(achievable_centralized=cen, achievable_decentralized=dec, upper=up,
               ratio_centralized=up / cen, ratio_decentralized=up / dec,
               q_centralized=splitting_ratio_centralized(cfg),
               q_decentralized=splitting_ratio_decentralized(cfg))
    return row


def cmd_dof(args, out) -> int:
    spec = SweepSpec.from_args(args)
    rows = [dof_row(cfg) for cfg in spec.points()]
    if spec.fmt == "json":
        for row in rows:
            out.write(dump_json({k: num(row[k]) for k in DOF_FIELDS}) + "\n")
    elif spec.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(DOF_FIELDS)
        for row in rows:
            w.writerow([text(row[k]) for k in DOF_FIELDS])
    else:
        cells = [[text(row[k]) for k in DOF_FIELDS] for row in rows]
        widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(DOF_FIELDS)]
        out.write("  ".join(h.rjust(wd) for h, wd in zip(DOF_FIELDS, widths)) + "\n")
        for c in cells:
            out.write("  ".join(v.rjust(wd) for v, wd in zip(c, widths)) + "\n")
    return 0


# --------------------------------------------------------------- schedule

def _packet(pkt) -> str:
    return f"W{pkt.file}[{pkt.index}]"


def _oracle_verdict(scheme: str, sched, oracle) -> tuple[bool, str]:
    hp, hn = len(sched.p_blocks), len(sched.n_blocks)
    if scheme == "centralized":
        ok = (hp, hn) == (oracle.p_blocks, oracle.n_blocks)
        return ok, ""
    sp, sn = sched.partial_block_slack("P"), sched.partial_block_slack("N")
    ok = (oracle.p_blocks <= hp <= oracle.p_blocks + sp
          and oracle.n_blocks <= hn <= oracle.n_blocks + sn)
    return ok, f" (partial-block slack P={sp} N={sn})"


def cmd_schedule(args, out) -> int:
    spec = SweepSpec.from_args(args)
    cfg = NetworkConfig(single(spec.kt, "kt"), single(spec.kr, "kr"),
                        single(spec.files, "n") if spec.files else single(spec.kr, "kr"),
                        single(spec.f, "f"), single(spec.mut, "mut"), single(spec.mur, "mur"),
                        single(spec.alpha, "alpha"))
    if args.demands:
        demands = check_demands(parse_values(args.demands, integer=True), cfg.num_rx, cfg.num_files)
    else:
        validate_config(cfg, "scheduler", args.scheme)
        demands = worst_case_demands(cfg)
    if args.scheme == "centralized":
        placement = centralized_place(cfg)
        sched = centralized_schedule(placement, demands)
    else:
        placement = decentralized_place(cfg, args.seed)
        sched = decentralized_schedule(placement, demands)
    real = placement.realization

    for blk in sched.p_blocks + sched.n_blocks:
        rx = ",".join(str(d.receiver) for d in blk.deliveries)
        pk = ",".join(_packet(d.packet) for d in blk.deliveries)
        out.write(f"{blk.side} receivers=({rx}) packets=({pk})\n")
    hp, hn = len(sched.p_blocks), len(sched.n_blocks)
    h = sched.delivery_time(cfg.alpha)
    dof = sched.realized_dof(cfg.alpha)
    out.write(f"{hp + hn} blocks, H={text(h, JSON_DIGITS)}, P={hp}, N={hn}, "
              f"q={text(sched.q, JSON_DIGITS)}, DoF={text(dof, JSON_DIGITS)}\n")

    if not args.oracle:
        return 0
    try:
        oracle = bounds.bruteforce_min_blocks(real, demands, cfg.alpha, max_items=args.max_items)
    except InstanceTooLarge as exc:
        print(f"error: InstanceTooLarge: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    ok, note = _oracle_verdict(args.scheme, sched, oracle)
    out.write(f"oracle P={oracle.p_blocks}, N={oracle.n_blocks}, "
              f"load={text(oracle.max_load, JSON_DIGITS)}: {'MATCH' if ok else 'MISMATCH'}{note}\n")
    return 0 if ok else EXIT_FAIL


# ----------------------------------------------------------------- verify

@dataclass
class SuiteResult:
    name: str
    passed: bool
    summary: str
    evidence: str = ""


def suite_gaps(args) -> SuiteResult:
    kr_max = args.kr_max or 32
    grid = bounds.default_grid(kr_max=kr_max)
    sw = bounds.sweep_gaps(grid)
    # exact spot checks at the worst points of the float sweep
    for cfg in (sw.argmax_centralized, sw.argmax_decentralized):
        bounds.gap_centralized(cfg)
        bounds.gap_decentralized(cfg)
    summary = (f"{sw.points} configs; max upper/centralized {sw.max_centralized_gap:.12g}, "
               f"max upper/decentralized {sw.max_decentralized_gap:.12g}, "
               f"max centralized/decentralized {sw.max_cen_over_dec:.12g}")
    evidence = (f"argmax centralized {sw.argmax_centralized}; argmax decentralized "
                f"{sw.argmax_decentralized}; sandwich violations {sw.sandwich_violations}")
    return SuiteResult("gaps", sw.passed, summary, evidence)


def suite_poly(args) -> SuiteResult:
    kr_max = args.kr_max or 64
    sw = analysis.certify_grid(kr_max=kr_max)
    summary = f"{sw.cells} (K, r) cells up to K={kr_max}; min p(z) {sw.min_sample:.12g} at K={sw.argmin[0]}, r={sw.argmin[1]}"
    evidence = "; ".join(f"K={k} r={r}: {','.join(f)}" for k, r, f in sw.failures[:10])
    return SuiteResult("poly", sw.passed, summary, evidence)


def suite_pinelis(args) -> SuiteResult:
    k_max = args.k or 128
    sw = analysis.pinelis_grid(k_max=k_max)
    # the direct rational evaluation must agree with the integer route
    probes = [(k, r) for k in sorted({1, 2, 5, min(k_max, 17)}) for r in analysis.r_grid(k, Fraction(3, 4))]
    drift = [(k, r) for k, r in probes
             if analysis.verify_pinelis_inequality(k, r, exact_arith=True).slack
             != analysis.pinelis_slack_exact(k, r)]
    zeros = sorted({str(r) for k, r in sw.zero_cells if r != k})
    summary = (f"{sw.cells} (K, r) cells up to K={k_max}; min slack {float(sw.min_slack):.12g}"
               f" at K={sw.argmin[0]}, r={sw.argmin[1]}; zero at r=K: {sw.zero_at_r_equals_k}")
    if zeros:
        summary += f"; also zero at r in {{{', '.join(zeros)}}} for K > r"
    evidence = f"rational and integer routes disagree at {drift[:5]}" if drift else ""
    return SuiteResult("pinelis", sw.passed and not drift, summary, evidence)


def _random_configs(rng: np.random.Generator, count: int) -> list[NetworkConfig]:
    out = []
    while len(out) < count:
        kt, kr = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        mut = Fraction(int(rng.integers(1, 17)), 16)
        if kt * mut < 1:
            continue
        out.append(NetworkConfig(kt, kr, kr, 1, mut, Fraction(int(rng.integers(0, 17)), 16)))
    return out


def suite_identities(args) -> SuiteResult:
    rng = np.random.default_rng(args.seed)
    alphas = [Fraction(k, 10) for k in range(11)]
    bad = []
    for cfg in _random_configs(rng, 100):
        rep = analysis.weighted_sum_check(cfg, alphas)
        if not rep.passed:
            bad.append(f"{cfg}: {rep.failures[:2]}")
    return SuiteResult("identities", not bad, f"100 random rational configs x {len(alphas)} alphas, "
                       f"{len(bad)} failures", "; ".join(bad[:5]))


def _tiny_instances(seed: int):
    """Small schedules in both schemes with their realizations and demands."""
    cases = []
    for kt, kr, mut, mur, f in [(2, 2, Fraction(1, 2), Fraction(1, 2), 4), (2, 3, Fraction(1, 2), Fraction(1, 3), 6),
                                (3, 3, Fraction(1, 3), Fraction(2, 3), 9), (1, 2, 1, 0, 2)]:
        cfg = NetworkConfig(kt, kr, kr, f, mut, mur, Fraction(1, 2))
        pl = centralized_place(cfg)
        d = worst_case_demands(cfg)
        cases.append(("centralized", cfg, pl, d, centralized_schedule(pl, d)))
    for kt, kr, mut, mur, f, s in [(2, 2, Fraction(1, 2), Fraction(1, 2), 4, seed),
                                   (2, 3, Fraction(1, 2), Fraction(1, 3), 6, seed + 1)]:
        cfg = NetworkConfig(kt, kr, kr, f, mut, mur, Fraction(1, 2))
        pl = decentralized_place(cfg, s)
        d = worst_case_demands(cfg)
        cases.append(("decentralized", cfg, pl, d, decentralized_schedule(pl, d)))
    return cases


def suite_counting(args) -> SuiteResult:
    """Schedules, feasibility, coverage, the exact oracle and the memory counting bounds."""
    bad = []
    n = 0
    for scheme, cfg, pl, d, sched in _tiny_instances(args.seed):
        n += 1
        real = pl.realization
        for blk in sched.p_blocks + sched.n_blocks:
            if not bounds.check_block_feasibility(blk, real):
                bad.append(f"{scheme} {cfg}: infeasible block {blk.deliveries}")
        cover = coverage_violations(sched, real, d)
        if cover:
            bad.append(f"{scheme} {cfg}: coverage violations {cover[:3]}")
        try:
            oracle = bounds.bruteforce_min_blocks(real, d, cfg.alpha)
        except InstanceTooLarge:
            oracle = None
        if oracle is not None and not _oracle_verdict(scheme, sched, oracle)[0]:
            bad.append(f"{scheme} {cfg}: oracle {oracle.p_blocks}/{oracle.n_blocks} vs "
                       f"{len(sched.p_blocks)}/{len(sched.n_blocks)}")
        if scheme == "decentralized":
            hp, hn, _ = decentralized_block_counts(pl, d)
            if (hp, hn) != (len(sched.p_blocks), len(sched.n_blocks)):
                bad.append(f"{cfg}: fast block counts {hp}/{hn} disagree with schedule")
        rep = bounds.verify_counting_bounds(pl)
        if not rep.holds:
            bad.append(f"{scheme} {cfg}: counting bounds {rep}")
        if scheme == "centralized" and not rep.library_tight:
            bad.append(f"{cfg}: library-size bound not tight for the centralized placement")
    cfg = NetworkConfig(2, 2, 2, 4, Fraction(1, 2), Fraction(1, 2))
    hp, hn = expected_blocks_decentralized(cfg)
    if (hp, hn) != (Fraction(3, 4), Fraction(3, 4)):
        bad.append(f"expected blocks {hp}, {hn} at K_R=2, mu_R=1/2")
    return SuiteResult("counting", not bad, f"{n} instances scheduled, oracle-checked and counted; "
                       f"{len(bad)} failures", "; ".join(bad[:5]))


def suite_tradeoff(args) -> SuiteResult:
    grid = np.linspace(0, 1, 101)
    bad = []
    curves = {}
    for kt in (8, 16):
        cfg = NetworkConfig(kt, 16, 16, 1, Fraction(1, 2), Fraction(1, 16))
        for scheme in analysis.SCHEMES:
            pts = analysis.tradeoff_curve(cfg, scheme, grid)
            vals = [p.delta_r for p in pts]
            curves[kt, scheme] = vals
            seen = [v for v in vals if v is not None]
            if any(b < a - 1e-9 for a, b in zip(seen, seen[1:])):
                bad.append(f"K_T={kt} {scheme}: not monotone")
    for scheme in analysis.SCHEMES:
        for a, b in zip(curves[8, scheme], curves[16, scheme]):
            if a is not None and b is not None and a > b + 1e-9:
                bad.append(f"{scheme}: K_T=8 curve above K_T=16")
                break
    return SuiteResult("tradeoff", not bad, "K_R=16, mu_R=1/16, mu_T=1/2, K_T in {8,16}, 101 points; "
                       "monotone and ordered" if not bad else "ordering/monotonicity failed",
                       "; ".join(bad))


def suite_jdom(args) -> SuiteResult:
    bad = []
    cells = 0
    for k in range(2, 17):
        for mu in (Fraction(i, 16) for i in range(1, 16)):
            cells += 1
            rep = analysis.check_j_dominance(k, mu)
            if not rep.passed:
                bad.append(f"K={k} mu={mu}: J({rep.worst_r})={rep.worst_value} > J(1)={rep.j_at_one}")
    return SuiteResult("jdom", not bad, f"{cells} (K_R, mu_R) pairs; J(r) <= J(1) on the r grid",
                       "; ".join(bad[:5]))


def suite_montecarlo(args) -> SuiteResult:
    cfg = NetworkConfig(2, 2, 2, 2000, Fraction(1, 2), Fraction(1, 2), 0)
    rep = montecarlo_delivery(cfg, seed=args.seed, trials=8)
    ok = rep.relative_error <= 0.05
    return SuiteResult("montecarlo", ok, f"K_R=2, F=2000, 8 trials: mean {rep.empirical_mean:.12g} vs "
                       f"formula {rep.formula:.12g} (rel. error {rep.relative_error:.3g})")


SUITES = {
    "gaps": suite_gaps,
    "poly": suite_poly,
    "pinelis": suite_pinelis,
    "identities": suite_identities,
    "counting": suite_counting,
    "tradeoff": suite_tradeoff,
    "jdom": suite_jdom,
    "montecarlo": suite_montecarlo,
}


def cmd_verify(args, out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        t0 = time.perf_counter()
        try:
            res = SUITES[name](args)
        except AssertionError as exc:
            res = SuiteResult(name, False, "assertion failed", str(exc))
        elapsed = time.perf_counter() - t0
        out.write(f"{'PASS' if res.passed else 'FAIL'} {name}: {res.summary} [{elapsed:.2f}s]\n")
        if not res.passed:
            failed = True
            if res.evidence:
                out.write(f"  evidence: {res.evidence}\n")
    return EXIT_FAIL if failed else 0


# --------------------------------------------------------------- tradeoff

def cmd_tradeoff(args, out) -> int:
    spec = SweepSpec.from_args(args)
    schemes = analysis.SCHEMES if spec.scheme == "both" else (spec.scheme,)
    if args.alpha_bar:
        grid = [float(v) for v in parse_values(args.alpha_bar)]
    else:
        if args.points < 1:
            raise UsageError("--points must be at least 1")
        grid = np.linspace(0.0, 1.0, args.points).tolist() if args.points > 1 else [0.0]
    if any(not 0 <= a <= 1 for a in grid):
        raise UsageError("alpha_bar values must lie in [0, 1]")
    cfgs = [c for c in spec.points()]
    rows = []
    for cfg in cfgs:
        for scheme in schemes:
            for pt in analysis.tradeoff_curve(cfg, scheme, grid):
                rows.append([text(pt.alpha_bar), text(pt.delta_r), scheme, str(cfg.num_tx),
                             str(cfg.num_rx), text(cfg.mu_t), text(cfg.mu_r)])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRADEOFF_HEADER)
    w.writerows(rows)
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return 0


# ------------------------------------------------------------- montecarlo

def cmd_montecarlo(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    spec = SweepSpec.from_args(args)
    cfg = NetworkConfig(single(spec.kt, "kt"), single(spec.kr, "kr"),
                        single(spec.files, "n") if spec.files else single(spec.kr, "kr"),
                        single(spec.f, "f"), single(spec.mut, "mut"), single(spec.mur, "mur"),
                        single(spec.alpha, "alpha"))
    rep = montecarlo_delivery(cfg, seed=args.seed, trials=args.trials)
    ok = rep.relative_error <= args.tol
    payload = {
        "formula": num(rep.formula),
        "empirical_mean": num(rep.empirical_mean),
        "stderr": num(rep.stderr),
        "trials": rep.trials,
        "seed": rep.seed,
        "relative_error": num(rep.relative_error),
        "tol": num(args.tol),
        "within_tol": ok,
        "cached_fraction_by_l": [num(x) for x in rep.cached_fraction_by_l],
        "binomial_pmf": [num(x) for x in rep.binomial_pmf],
    }
    out.write(dump_json(payload) + "\n")
    return 0 if ok else EXIT_FAIL


# ----------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cachedof", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dof", help="achievable DoF of both schemes, upper bound and gap ratios")
    add_config_flags(d)
    d.add_argument("--format", choices=("json", "table", "csv"), default="json")
    d.set_defaults(func=cmd_dof)

    s = sub.add_parser("schedule", help="list the delivery blocks of one instance")
    add_config_flags(s, kt="2", kr="2", f="4", mut="1/2", mur="1/2", alpha="1/2")
    s.add_argument("--scheme", choices=("centralized", "decentralized"), default="centralized")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--demands", default=None, help="comma-separated file per receiver (default: distinct)")
    s.add_argument("--oracle", action="store_true", help="compare against the exact minimum block count")
    s.add_argument("--max-items", type=int, default=16)
    s.set_defaults(func=cmd_schedule)

    v = sub.add_parser("verify", help="run certification suites")
    v.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    v.add_argument("--kr-max", type=int, default=None)
    v.add_argument("--k", type=int, default=None, help="largest K for the pinelis suite")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tradeoff", help="extra receiver memory versus lost CSIT bandwidth, as CSV")
    add_config_flags(t, kt="8,16")
    t.add_argument("--scheme", choices=("centralized", "decentralized", "both"), default="both")
    t.add_argument("--points", type=int, default=101)
    t.add_argument("--alpha-bar", default=None, help="explicit grid, list or start:stop:step")
    t.add_argument("--output", default=None)
    t.set_defaults(func=cmd_tradeoff)

    m = sub.add_parser("montecarlo", help="empirical decentralized delivery time versus the formula")
    add_config_flags(m, kt="2", kr="2", f="10000", mut="1/2", mur="1/2", alpha="0")
    m.add_argument("--trials", type=int, default=32)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--tol", type=float, default=0.05)
    m.set_defaults(func=cmd_montecarlo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    out = sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
