"""Array kernels with two interchangeable backends.

The numba versions are plain loops compiled with ``@njit``; the numpy
versions vectorize over the leading axis. ``CACHEDOF_BACKEND=numpy`` forces
the numpy path, and it is also used whenever numba cannot be imported.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def _initial_backend() -> str:
    want = os.environ.get("CACHEDOF_BACKEND", "").strip().lower()
    if want == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


_BACKEND = _initial_backend()


def backend() -> str:
    return _BACKEND


def set_backend(name: str) -> str:
    """Switch backend at runtime; returns the previous one."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _BACKEND = _BACKEND, name
    return prev


def _binom_table(n: int) -> np.ndarray:
    """Float Pascal triangle, table[a, b] = C(a, b) for 0 <= a, b <= n."""
    t = np.zeros((n + 1, n + 1))
    t[:, 0] = 1.0
    for a in range(1, n + 1):
        t[a, 1:a + 1] = t[a - 1, 0:a] + t[a - 1, 1:a + 1]
    return t


# ---------------------------------------------------------------- leg sums
# S(r) = sum_{l<K} C(K-1,l) mu^l (1-mu)^(K-1-l) / min(r+l, K)

@njit(cache=True)
def _leg_sums_nb(k, mu, r):
    out = np.empty(k.shape[0])
    for i in range(k.shape[0]):
        kk = k[i]
        m = mu[i]
        c = 1.0
        s = 0.0
        for l in range(kk):
            if l > 0:
                c = c * (kk - l) / l
            s += c * m ** l * (1.0 - m) ** (kk - 1 - l) / min(r[i] + l, kk)
        out[i] = s
    return out


def _leg_sums_np(k, mu, r):
    kmax = int(k.max())
    table = _binom_table(kmax)
    out = np.zeros(k.shape[0])
    for l in range(kmax):
        live = l < k
        e = np.where(live, k - 1 - l, 0)
        c = table[np.maximum(k - 1, 0), l]
        term = c * mu ** l * (1.0 - mu) ** e / np.minimum(r + l, k)
        out += np.where(live, term, 0.0)
    return out


def leg_sums(k, mu, r) -> np.ndarray:
    k = np.ascontiguousarray(k, dtype=np.int64)
    mu = np.ascontiguousarray(np.broadcast_to(mu, k.shape), dtype=np.float64)
    r = np.ascontiguousarray(np.broadcast_to(r, k.shape), dtype=np.float64)
    if k.size == 0:
        return np.zeros(0)
    if _BACKEND == "numba":
        return _leg_sums_nb(k, mu, r)
    return _leg_sums_np(k, mu, r)


# ------------------------------------------------- holder-set histograms
# counts[k, m] = number of packets of the file demanded by receiver k whose
# set of caching receivers, as a bitmask, equals m.

@njit(cache=True)
def _holder_hist_nb(rx, demands):
    kr, _, nf = rx.shape
    out = np.zeros((kr, 1 << kr), dtype=np.int64)
    for k in range(kr):
        n = demands[k]
        for f in range(nf):
            code = 0
            for j in range(kr):
                if rx[j, n, f]:
                    code |= 1 << j
            out[k, code] += 1
    return out


def _holder_hist_np(rx, demands):
    kr = rx.shape[0]
    weights = (np.int64(1) << np.arange(kr, dtype=np.int64))
    out = np.zeros((kr, 1 << kr), dtype=np.int64)
    for k in range(kr):
        codes = np.tensordot(weights, rx[:, demands[k], :].astype(np.int64), axes=1)
        out[k] = np.bincount(codes, minlength=1 << kr)
    return out


def holder_histogram(rx_mask: np.ndarray, demands) -> np.ndarray:
    """``demands`` are 1-based file indices, one per receiver."""
    rx = np.ascontiguousarray(rx_mask, dtype=np.bool_)
    d = np.ascontiguousarray(np.asarray(demands, dtype=np.int64) - 1)
    if _BACKEND == "numba":
        return _holder_hist_nb(rx, d)
    return _holder_hist_np(rx, d)


@njit(cache=True)
def _cached_count_hist_nb(rx):
    kr, nfiles, nf = rx.shape
    out = np.zeros(kr + 1, dtype=np.int64)
    for n in range(nfiles):
        for f in range(nf):
            c = 0
            for j in range(kr):
                if rx[j, n, f]:
                    c += 1
            out[c] += 1
    return out


def cached_count_histogram(rx_mask: np.ndarray) -> np.ndarray:
    """Number of packets in the library held by exactly l receivers, l = 0..K_R."""
    rx = np.ascontiguousarray(rx_mask, dtype=np.bool_)
    if _BACKEND == "numba":
        return _cached_count_hist_nb(rx)
    return np.bincount(rx.sum(axis=0).ravel(), minlength=rx.shape[0] + 1)


# ------------------------------------------------------ polynomial values

@njit(cache=True)
def _horner_nb(coeffs, x):
    out = np.empty(x.shape[0])
    deg = coeffs.shape[0] - 1
    for i in range(x.shape[0]):
        acc = 0.0
        for m in range(deg, -1, -1):
            acc = acc * x[i] + coeffs[m]
        out[i] = acc
    return out


def poly_values(coeffs, x) -> np.ndarray:
    """Evaluate sum_m coeffs[m] x^m (ascending order)."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _BACKEND == "numba":
        return _horner_nb(coeffs, x)
    return np.polynomial.polynomial.polyval(x, coeffs)


# ------------------------------------------------ cooperation-sum sides
# lhs = sum_{m=1}^{K} m/min(r+m-1,K) C(K,m) z^m with z = (K-r)/(K+r)
# rhs = (K-r+2)/(K+r) ((2K/(K+r))^K - 1)

@njit(cache=True)
def _pinelis_nb(k, r):
    n = k.shape[0]
    lhs = np.empty(n)
    rhs = np.empty(n)
    for i in range(n):
        kk = k[i]
        z = (kk - r[i]) / (kk + r[i])
        c = 1.0
        zp = 1.0
        s = 0.0
        for m in range(1, kk + 1):
            c = c * (kk - m + 1) / m
            zp = zp * z
            s += m / min(r[i] + m - 1, kk) * c * zp
        lhs[i] = s
        rhs[i] = (kk - r[i] + 2) / (kk + r[i]) * ((2.0 * kk / (kk + r[i])) ** kk - 1.0)
    return lhs, rhs


def _pinelis_np(k, r):
    kmax = int(k.max())
    table = _binom_table(kmax)
    z = (k - r) / (k + r)
    lhs = np.zeros(k.shape[0])
    for m in range(1, kmax + 1):
        live = m <= k
        term = m / np.minimum(r + m - 1, k) * table[k, m] * z ** m
        lhs += np.where(live, term, 0.0)
    rhs = (k - r + 2) / (k + r) * ((2.0 * k / (k + r)) ** k - 1.0)
    return lhs, rhs


def pinelis_sides(k, r) -> tuple[np.ndarray, np.ndarray]:
    k = np.ascontiguousarray(k, dtype=np.int64)
    r = np.ascontiguousarray(np.broadcast_to(r, k.shape), dtype=np.float64)
    if k.size == 0:
        return np.zeros(0), np.zeros(0)
    if _BACKEND == "numba":
        return _pinelis_nb(k, r)
    return _pinelis_np(k, r)
