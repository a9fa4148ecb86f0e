"""Both kernel backends must agree with each other and with direct evaluation."""
from fractions import Fraction as Fr
import math

import numpy as np
import pytest

from cachedof import _kernels
from cachedof.decentralized import decentralized_place


def test_backend_switch_roundtrip():
    prev = _kernels.set_backend("numpy")
    assert _kernels.backend() == "numpy"
    _kernels.set_backend(prev)
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


def test_leg_sums_match_exact_sum(kernel_backend):
    k = np.array([1, 2, 5, 16, 32])
    mu = np.array([0.0, 0.5, 0.2, 1 / 16, 0.75])
    r = np.array([1.0, 1.0, 2.5, 8.0, 3.0])
    got = _kernels.leg_sums(k, mu, r)
    for i in range(len(k)):
        K, m, rr = int(k[i]), Fr(mu[i]), Fr(r[i])
        want = sum(math.comb(K - 1, l) * m ** l * (1 - m) ** (K - 1 - l) / min(rr + l, K)
                   for l in range(K))
        assert got[i] == pytest.approx(float(want), rel=1e-12)


def test_holder_histogram_matches_bruteforce(kernel_backend):
    rng = np.random.default_rng(3)
    rx = rng.random((3, 4, 50)) < 0.4
    demands = [2, 4, 1]
    hist = _kernels.holder_histogram(rx, demands)
    for k, n in enumerate(demands):
        for f in range(50):
            code = sum(1 << j for j in range(3) if rx[j, n - 1, f])
            hist[k, code] -= 1
    assert not hist.any()


def test_cached_count_histogram(kernel_backend):
    rng = np.random.default_rng(5)
    rx = rng.random((4, 3, 20)) < 0.5
    got = _kernels.cached_count_histogram(rx)
    want = np.bincount(rx.sum(axis=0).ravel(), minlength=5)
    assert np.array_equal(got, want)


def test_poly_values(kernel_backend):
    c = [0.0, 1.5, 1.0, 0.25, -0.25]
    x = np.linspace(0, 1, 7)
    want = [sum(cm * xi ** m for m, cm in enumerate(c)) for xi in x]
    assert np.allclose(_kernels.poly_values(c, x), want, rtol=0, atol=1e-15)


def test_pinelis_sides_small_k(kernel_backend):
    lhs, rhs = _kernels.pinelis_sides(np.array([4]), np.array([2.0]))
    assert lhs[0] == pytest.approx(100 / 81, rel=1e-14)
    assert rhs[0] == pytest.approx(350 / 243, rel=1e-14)


def test_backends_agree_on_random_inputs():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    rng = np.random.default_rng(11)
    k = rng.integers(1, 40, size=200)
    mu = rng.random(200)
    r = 1 + rng.random(200) * (k - 1)
    rx = rng.random((4, 5, 64)) < 0.3
    out = {}
    for name in ("numba", "numpy"):
        prev = _kernels.set_backend(name)
        try:
            out[name] = (_kernels.leg_sums(k, mu, r), _kernels.pinelis_sides(k, r),
                         _kernels.holder_histogram(rx, [1, 2, 3, 4]),
                         _kernels.cached_count_histogram(rx))
        finally:
            _kernels.set_backend(prev)
    a, b = out["numba"], out["numpy"]
    assert np.allclose(a[0], b[0], rtol=1e-12)
    assert np.allclose(a[1][0], b[1][0], rtol=1e-10) and np.allclose(a[1][1], b[1][1], rtol=1e-10)
    assert np.array_equal(a[2], b[2]) and np.array_equal(a[3], b[3])


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("CACHEDOF_BACKEND", "numpy")
    assert _kernels._initial_backend() == "numpy"


def test_placement_statistics_do_not_depend_on_backend(kernel_backend):
    from cachedof.model import NetworkConfig

    pl = decentralized_place(NetworkConfig(2, 3, 3, 30, Fr(1, 2), Fr(1, 3)), seed=4)
    hist = _kernels.cached_count_histogram(pl.realization.rx_mask)
    assert hist.sum() == 90
