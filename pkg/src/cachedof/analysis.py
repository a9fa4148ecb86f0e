"""Polynomial certificate, binomial-sum inequality, J(r) dominance and the cache/CSIT tradeoff.

The polynomial studied here is

    p(z) = sum_{m=0}^{K-1} C(K-1,m) z^m [ (z(K+1)+1)/(1+m) - (z(K+r)+r)/min(r+m,K) ]

on z in [0, (K-r)/(K+r)], written as sum_m c_m z^m. Its nonnegativity is
what makes the decentralized gap argument work; the certificate below checks
every step that establishes it, in exact rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from ._parallel import ordered_map
from .bounds import dof_upper_bound
from .centralized import dof_centralized
from .decentralized import dof_decentralized
from ._rational import to_fraction, to_q
from .model import DomainError, NetworkConfig, Real, binom, exact

NONNEG_TOL = 1e-12


def _check_domain(k_r: int, r: Real, k_min: int = 2) -> Fraction:
    if int(k_r) != k_r or k_r < k_min:
        raise DomainError(f"K must be an integer >= {k_min}, got {k_r}")
    r = Fraction(r)
    if not 1 <= r <= k_r:
        raise DomainError(f"r = {r} outside [1, {k_r}]")
    return r


def _coeffs(K: int, r) -> list:
    one = to_q(1)
    c = [0 * one]
    for m in range(1, K):
        c.append(binom(K - 1, m - 1) * (one * (K + 1) / m - (K + r) / min(r + m - 1, K))
                 + binom(K - 1, m) * (one / (m + 1) - r / min(r + m, K)))
    c.append((1 - r) / K)
    return c


def poly_coefficients(k_r: int, r: Real) -> tuple[Fraction, ...]:
    """Exact c_0..c_K of p(z)."""
    r = _check_domain(k_r, r)
    return tuple(to_fraction(x) for x in _coeffs(int(k_r), to_q(r)))


def poly_coefficients_float(k_r: int, r: float) -> np.ndarray:
    """Floating-point c_0..c_K, evaluated independently of the rational path."""
    _check_domain(k_r, Fraction(r).limit_denominator(1 << 40))
    K, r = int(k_r), float(r)
    m = np.arange(1, K)
    lo = np.array([math.comb(K - 1, int(i) - 1) for i in m], dtype=float)
    hi = np.array([math.comb(K - 1, int(i)) for i in m], dtype=float)
    mid = (lo * ((K + 1) / m - (K + r) / np.minimum(r + m - 1, K))
           + hi * (1 / (m + 1) - r / np.minimum(r + m, K)))
    return np.concatenate(([0.0], mid, [(1 - r) / K]))


def normalized_coefficients(k_r: int, r: Real) -> tuple[Fraction, ...]:
    """c'_m = c_m / C(K-1, m-1) for m = 1..K-1."""
    c = poly_coefficients(k_r, r)
    return tuple(c[m] / binom(k_r - 1, m - 1) for m in range(1, k_r))


def zeta_max(k_r: int, r: Real) -> Fraction:
    r = Fraction(r)
    return (k_r - r) / (k_r + r)


# ------------------------------------------------------------ certificate

def d_seq(k_r: int, r, m: int):
    return ((k_r - m + 1) * (r - 1) / (m * (m + r - 1))
            + (k_r - m) * (1 - r) / ((m + 1) * (m + r)))


def e_seq(k_r: int, r, m: int):
    one = to_q(1)
    return one * (k_r + 1) / m + one * k_r / (m * (m + 1)) - one / (m + 1) - r / m - 1


def l_parts(k_r: int, rt: int, eps):
    K = k_r
    l1 = K * (K + eps - 1) * (K + 1 - rt - eps) * (K - rt + 2)
    l2 = K * (K + eps - 1) * (K + rt)
    l3 = (eps - 1) * (K + eps + rt) * (K - rt) * (K - rt + 1) * (K - rt + 2)
    return l1, l2, l3


def g_poly(k_r: int, rt: int) -> int:
    K = k_r
    return K * (K - 1) * (K + rt) + (K - rt) * (K - rt + 2) * (rt * rt - rt - K)


def sign_pattern_ok(c: Sequence) -> bool:
    """Nonnegative entries, then one positive pivot, then nonpositive entries.

    With no positive entry at all, every entry must be nonpositive.
    """
    pos = [m for m, v in enumerate(c) if v > 0]
    if not pos:
        return all(v <= 0 for v in c)
    return all(v >= 0 for v in c[:pos[-1]])


def _nonincreasing(xs: Sequence) -> bool:
    return all(a >= b for a, b in zip(xs, xs[1:]))


@dataclass(frozen=True)
class PolyCertificate:
    k_r: int
    r: Fraction
    coeffs: tuple
    normalized: tuple
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def quasiconcavity_certificate(k_r: int, r: Real) -> PolyCertificate:
    """Run the chain of exact checks showing the coefficients of p change sign once.

    a_sign_pattern      c_0..c_K: nonnegatives, a positive pivot, nonpositives
    b_normalized_monotone  c'_m non-increasing on 1..K-1
    c_closed_forms      c'_m equals d_m below K-floor(r), e_m above it, and
                        the d_m and e_m sequences are non-increasing there
    d_boundary          c'_{K-rt} <= d_{K-rt} <= d_{K-rt-1} and c'_{K-rt} >= e_{K-rt+1}
    e_parabola          l(eps) >= 0, each part above its bound, the bounds sum to
                        g(K) >= 0, and l(eps) is c'_{K-rt} - e_{K-rt+1} times its
                        positive denominator
    """
    r_exact = _check_domain(k_r, r)
    K = int(k_r)
    r = to_q(r_exact)
    c = _coeffs(K, r)
    cn = [c[m] / binom(K - 1, m - 1) for m in range(1, K)]
    rt = math.floor(r_exact)
    eps = r - rt
    mid = K - rt
    checks: dict[str, bool] = {}

    checks["a_sign_pattern"] = sign_pattern_ok(c) and c[0] == 0 and c[K] <= 0
    checks["b_normalized_monotone"] = _nonincreasing(cn)

    def cp(m):
        return cn[m - 1]

    low = range(1, mid)
    high = range(mid + 1, K)
    d_vals = [d_seq(K, r, m) for m in low]
    e_vals = [e_seq(K, r, m) for m in high]
    checks["c_closed_forms"] = (
        all(cp(m) == v for m, v in zip(low, d_vals))
        and all(cp(m) == v for m, v in zip(high, e_vals))
        and _nonincreasing(d_vals) and _nonincreasing(e_vals))

    if 1 <= mid <= K - 1:
        one = to_q(1)
        d_mid = d_seq(K, r, mid)
        middle = ((one * (K + 1) / mid - (K + rt + eps) / (K + eps - 1))
                  + one * rt / mid * (one / (mid + 1) - (rt + eps) / K))
        ok = cp(mid) == middle and cp(mid) <= d_mid
        if mid - 1 >= 1:
            ok = ok and d_mid <= d_vals[-1] and cp(mid) <= d_vals[-1]
        if mid + 1 <= K - 1:
            ok = ok and cp(mid) >= e_vals[0]
        checks["d_boundary"] = bool(ok)

        l1, l2, l3 = l_parts(K, rt, eps)
        b1, _, _ = l_parts(K, rt, 1)
        _, b2, b3 = l_parts(K, rt, 0)
        g = g_poly(K, rt)
        a_coef = rt * rt + 2 * rt - 3
        b_coef = -rt * (2 * rt * rt - 3 * rt + 1)
        ok = (l1 + l2 + l3 >= 0 and l1 >= b1 and l2 >= b2 and l3 >= b3
              and b1 + b2 + b3 == g and g >= 0
              and g == a_coef * K * K + b_coef * K + g_poly(0, rt))
        if mid + 1 <= K - 1:
            denom = K * (K + eps - 1) * (K - rt) * (K - rt + 1) * (K - rt + 2)
            ok = ok and (cp(mid) - e_vals[0]) * denom == l1 + l2 + l3
        checks["e_parabola"] = bool(ok)
    else:
        checks["d_boundary"] = True
        checks["e_parabola"] = True
    return PolyCertificate(K, r_exact, tuple(to_fraction(x) for x in c),
                           tuple(to_fraction(x) for x in cn), checks)


def verify_poly_nonneg(k_r: int, r: Real, samples: int = 1000) -> float:
    """Smallest value of p over both endpoints and ``samples`` interior points of its domain."""
    if samples < 2:
        raise ValueError("samples must be at least 2")
    r = _check_domain(k_r, r)
    c = [float(x) for x in _coeffs(int(k_r), to_q(r))]
    zs = np.linspace(0.0, float(zeta_max(k_r, r)), samples + 2)
    lo = float(_kernels.poly_values(c, zs).min())
    if lo < -NONNEG_TOL:
        raise AssertionError(f"p dips to {lo} for K={k_r}, r={r}")
    return lo


def poly_value(k_r: int, r: Real, z: Real) -> Real:
    return sum(cm * z ** m for m, cm in enumerate(poly_coefficients(k_r, r)))


@dataclass(frozen=True)
class CertificateSweep:
    cells: int
    failures: tuple
    min_sample: float
    argmin: tuple

    @property
    def passed(self) -> bool:
        return not self.failures and self.min_sample >= -NONNEG_TOL


def r_grid(k: int, step: Real = Fraction(1, 4)) -> list[Fraction]:
    step = Fraction(step)
    n = int((k - 1) / step)
    return [1 + i * step for i in range(n + 1)]


def certify_grid(kr_max: int = 64, kr_min: int = 2, step: Real = Fraction(1, 4),
                 samples: int = 1000) -> CertificateSweep:
    cells = [(k, r) for k in range(kr_min, kr_max + 1) for r in r_grid(k, step)]

    def one(cell):
        k, r = cell
        cert = quasiconcavity_certificate(k, r)
        try:
            low = verify_poly_nonneg(k, r, samples)
        except AssertionError:
            low = -math.inf
        return cert.failures(), low

    results = ordered_map(one, cells)
    fails = tuple((k, r, f) for (k, r), (f, _) in zip(cells, results) if f)
    lows = [low for _, low in results]
    i = int(np.argmin(lows))
    return CertificateSweep(len(cells), fails, float(lows[i]), cells[i])


# ------------------------------------------------- cooperation inequality

@dataclass(frozen=True)
class PinelisResult:
    lhs: Real
    rhs: Real
    slack: Real


def verify_pinelis_inequality(k: int, r: Real, exact_arith: bool = False) -> PinelisResult:
    """sum_{m=1}^{K} m/min(r+m-1,K) C(K,m) z^m <= (K-r+2)/(K+r) ((2K/(K+r))^K - 1).

    Here z = (K-r)/(K+r). Raises AssertionError when the inequality fails
    by more than 1e-12.
    """
    r = _check_domain(k, r, k_min=1)
    K = int(k)
    if exact_arith:
        z = (K - r) / (K + r)
        lhs = sum(Fraction(m) / min(r + m - 1, K) * binom(K, m) * z ** m for m in range(1, K + 1))
        rhs = (K - r + 2) / (K + r) * ((2 * K / (K + r)) ** K - 1)
    else:
        lo, hi = _kernels.pinelis_sides(np.array([K]), np.array([float(r)]))
        lhs, rhs = float(lo[0]), float(hi[0])
    slack = rhs - lhs
    if not exact_arith and slack < -NONNEG_TOL:
        # both sides grow like 2^K and cancel; let the integer route decide
        slack = float(pinelis_slack_exact(K, r))
    if slack < -NONNEG_TOL:
        raise AssertionError(f"inequality fails at K={K}, r={r}: slack {slack}")
    return PinelisResult(lhs, rhs, slack)


@dataclass(frozen=True)
class PinelisSweep:
    cells: int
    min_slack: float
    argmin: tuple
    min_interior_slack: float
    zero_at_r_equals_k: bool
    zero_cells: tuple = ()

    @property
    def passed(self) -> bool:
        return self.min_slack >= -NONNEG_TOL and self.zero_at_r_equals_k


def pinelis_slack_exact(k: int, r: Real) -> Fraction:
    """Exact slack of the binomial-sum inequality, computed in integers.

    With r = p/q, u = qK - p and v = qK + p, both sides are scaled by
    v^(K+1) * lcm of the denominators, which leaves only integer sums.
    """
    r = _check_domain(k, r, k_min=1)
    K, p, q = int(k), r.numerator, r.denominator
    u, v = q * K - p, q * K + p
    dens = [min(p + q * (m - 1), q * K) for m in range(1, K + 1)]
    L = math.lcm(*dens)
    total = 0
    u_pow, v_pows = 1, [1] * (K + 1)
    for i in range(1, K + 1):
        v_pows[i] = v_pows[i - 1] * v
    for m in range(1, K + 1):
        u_pow *= u
        total += (L // dens[m - 1]) * q * m * math.comb(K, m) * u_pow * v_pows[K - m]
    scaled = (q * K - p + 2 * q) * ((2 * q * K) ** K - v_pows[K]) * L - v * total
    return Fraction(scaled, v_pows[K] * v * L)


def pinelis_grid(k_max: int = 128, k_min: int = 1, step: Real = Fraction(1, 4)) -> PinelisSweep:
    """Exact slack over the (K, r) grid. Float sides would cancel catastrophically for large K."""
    cells = [(k, r) for k in range(k_min, k_max + 1) for r in r_grid(k, step)]
    slack = ordered_map(lambda c: pinelis_slack_exact(*c), cells)
    i = min(range(len(cells)), key=slack.__getitem__)
    interior = [s for (k, r), s in zip(cells, slack) if r != k]
    return PinelisSweep(
        cells=len(cells),
        min_slack=slack[i],
        argmin=cells[i],
        min_interior_slack=min(interior) if interior else math.nan,
        zero_at_r_equals_k=all(s == 0 for (k, r), s in zip(cells, slack) if r == k),
        zero_cells=tuple(c for c, s in zip(cells, slack) if s == 0),
    )


# ------------------------------------------------------------ J dominance

def j_function(r: Real, k_r: int, mu_r: Real) -> Real:
    """Upper-bound P-leg over the decentralized P-leg at transmitter load r."""
    if r < 1:
        raise DomainError(f"r = {r} < 1")
    if not 0 < mu_r < 1:
        raise DomainError(f"mu_R = {mu_r} must lie in (0, 1)")
    K = k_r
    mu = exact(mu_r)
    r = exact(r)
    head = min((r + K * mu) / (1 - mu), K)
    tail = sum(binom(K - 1, m) * mu ** m * (1 - mu) ** (K - 1 - m) / min(r + m, K)
               for m in range(K))
    return head * tail


@dataclass(frozen=True)
class JDominance:
    passed: bool
    j_at_one: Real
    worst_r: Real
    worst_value: Real


def check_j_dominance(k_r: int, mu_r: Real, r_values: Sequence[Real] | None = None,
                      tol: float = 1e-12) -> JDominance:
    r_values = r_grid(k_r) if r_values is None else list(r_values)
    j1 = j_function(1, k_r, mu_r)
    vals = [(j_function(r, k_r, mu_r), r) for r in r_values]
    worst, wr = max(vals, key=lambda x: x[0])
    exact_mode = isinstance(j1, Fraction) and isinstance(worst, Fraction)
    ok = worst <= j1 if exact_mode else worst <= j1 * (1 + tol)
    return JDominance(bool(ok), j1, wr, worst)


# --------------------------------------------------------------- tradeoff

SCHEMES = ("centralized", "decentralized")


def delivery_time(cfg: NetworkConfig, scheme: str) -> float:
    """Per-packet delivery time of ``scheme`` from its DoF formula."""
    if scheme == "centralized":
        dof = dof_centralized(cfg)
    elif scheme == "decentralized":
        dof = dof_decentralized(cfg)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return cfg.num_rx * (1 - exact(cfg.mu_r)) / dof


@dataclass(frozen=True)
class TradeoffPoint:
    alpha_bar: float
    delta_r: float | None
    scheme: str
    residual: float = 0.0

    @property
    def attainable(self) -> bool:
        return self.delta_r is not None


def _float_cfg(cfg: NetworkConfig, mu_r: float, alpha: float) -> NetworkConfig:
    return NetworkConfig(cfg.num_tx, cfg.num_rx, cfg.num_files, cfg.packets_per_file,
                         float(cfg.mu_t), min(1.0, max(0.0, mu_r)), min(1.0, max(0.0, alpha)))


def bisect_decreasing(f, lo: float, hi: float, tol: float) -> float:
    """Root of a non-increasing f with f(lo) >= 0 >= f(hi)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def tradeoff_curve(cfg: NetworkConfig, scheme: str, alpha_bar_grid: Sequence[float],
                   tol: float = 1e-12) -> list[TradeoffPoint]:
    """Extra receiver memory delta_R that offsets losing a fraction alpha_bar of CSIT bandwidth.

    Solves H(mu_T, mu_R + delta_R, 1 - alpha_bar) = H(mu_T, mu_R, 1) by
    bisection on [0, 1 - mu_R]. Points with no solution get delta_r None.
    """
    mu = float(cfg.mu_r)
    target = float(delivery_time(_float_cfg(cfg, mu, 1.0), scheme))
    span = 1.0 - mu
    out = []
    for ab in alpha_bar_grid:
        ab = float(ab)

        def gap(delta):
            return float(delivery_time(_float_cfg(cfg, mu + delta, 1.0 - ab), scheme)) - target

        g0 = gap(0.0)
        if g0 <= 0:
            out.append(TradeoffPoint(ab, 0.0, scheme, g0))
            continue
        if gap(span) > 0:
            out.append(TradeoffPoint(ab, None, scheme, math.nan))
            continue
        delta = bisect_decreasing(gap, 0.0, span, tol)
        res = gap(delta) / target if target else 0.0
        out.append(TradeoffPoint(ab, delta, scheme, res))
    return out


# ---------------------------------------------------------- weighted sums

@dataclass(frozen=True)
class WeightedSumReport:
    passed: bool
    worst: float
    failures: tuple = ()

    def __bool__(self):
        return self.passed


def weighted_sum_check(cfg: NetworkConfig, alpha_grid: Sequence[Real]) -> WeightedSumReport:
    """value(alpha) == alpha value(1) + (1 - alpha) value(0) for all three DoF expressions."""
    funcs = {"centralized": dof_centralized, "decentralized": dof_decentralized,
             "upper": dof_upper_bound}
    worst = 0.0
    bad = []
    for name, f in funcs.items():
        v1, v0 = f(cfg.with_alpha(1)), f(cfg.with_alpha(0))
        for a in alpha_grid:
            a = exact(a)
            lhs = f(cfg.with_alpha(a))
            rhs = a * v1 + (1 - a) * v0
            if all(isinstance(x, Fraction) for x in (lhs, rhs)):
                ok = lhs == rhs
                err = float(abs(lhs - rhs))
            else:
                err = abs(float(lhs) - float(rhs)) / max(1.0, abs(float(rhs)))
                ok = err <= 1e-12
            worst = max(worst, err)
            if not ok:
                bad.append((name, a))
    return WeightedSumReport(not bad, worst, tuple(bad))
