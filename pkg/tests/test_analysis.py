from fractions import Fraction as Fr
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cachedof.analysis import (
    check_j_dominance,
    certify_grid,
    d_seq,
    e_seq,
    g_poly,
    j_function,
    l_parts,
    normalized_coefficients,
    pinelis_grid,
    pinelis_slack_exact,
    poly_coefficients,
    poly_coefficients_float,
    poly_value,
    quasiconcavity_certificate,
    r_grid,
    sign_pattern_ok,
    tradeoff_curve,
    delivery_time,
    verify_pinelis_inequality,
    verify_poly_nonneg,
    weighted_sum_check,
    zeta_max,
)
from cachedof.model import DomainError, NetworkConfig

from reference import p_direct, poly_coeffs_ref

grid_cells = st.integers(2, 24).flatmap(
    lambda k: st.tuples(st.just(k), st.integers(0, 4 * (k - 1)).map(lambda i: 1 + Fr(i, 4))))


class TestCoefficients:
    def test_k4_r2(self):
        c = poly_coefficients(4, 2)
        assert c == (0, Fr(3, 2), 1, Fr(1, 4), Fr(-1, 4))
        assert c == poly_coeffs_ref(4, 2)
        assert normalized_coefficients(4, 2) == (Fr(3, 2), Fr(1, 3), Fr(1, 12))

    def test_r_one_is_zero_polynomial(self):
        assert all(x == 0 for x in poly_coefficients(4, 1))

    def test_domain(self):
        with pytest.raises(DomainError):
            poly_coefficients(4, Fr(9, 2))
        with pytest.raises(DomainError):
            poly_coefficients(1, 1)

    @given(grid_cells)
    def test_match_expansion_and_direct_value(self, cell):
        k, r = cell
        c = poly_coefficients(k, r)
        assert c == poly_coeffs_ref(k, r)
        assert c[0] == 0 and c[k] == (1 - r) / k
        z = zeta_max(k, r) / 2
        assert poly_value(k, r, z) == p_direct(k, r, z)

    @given(grid_cells)
    def test_float_route_agrees(self, cell):
        k, r = cell
        exact = poly_coefficients(k, r)
        approx = poly_coefficients_float(k, float(r))
        for m in range(1, k):
            scale = math.comb(k - 1, m - 1)
            assert abs(float(exact[m]) - approx[m]) <= 1e-12 * scale * (k + 1)


class TestCertificate:
    def test_k4_r2_passes(self):
        cert = quasiconcavity_certificate(4, 2)
        assert cert.passed, cert.failures()
        assert list(cert.checks) == ["a_sign_pattern", "b_normalized_monotone", "c_closed_forms",
                                     "d_boundary", "e_parabola"]

    def test_r_one_passes_vacuously(self):
        assert quasiconcavity_certificate(7, 1).passed

    @settings(max_examples=60, deadline=None)
    @given(grid_cells)
    def test_random_cells_pass(self, cell):
        assert quasiconcavity_certificate(*cell).passed

    def test_grid_to_sixteen(self):
        sw = certify_grid(kr_max=16)
        assert sw.passed and sw.cells == sum(len(r_grid(k)) for k in range(2, 17))

    def test_sign_pattern_helper(self):
        assert sign_pattern_ok([0, 1, 2, -1, -3])
        assert sign_pattern_ok([0, 0, 0])
        assert not sign_pattern_ok([0, -1, 2, -1])
        assert not sign_pattern_ok([1, -1, 1])

    def test_closed_forms_against_normalized_coefficients(self):
        k, r = 12, Fr(7, 2)
        cn = normalized_coefficients(k, r)
        mid = k - 3
        assert all(cn[m - 1] == d_seq(k, r, m) for m in range(1, mid))
        assert all(cn[m - 1] == e_seq(k, r, m) for m in range(mid + 1, k))

    def test_parabola_bound(self):
        for k in range(3, 30):
            for rt in range(1, k):
                b1, _, _ = l_parts(k, rt, 1)
                _, b2, b3 = l_parts(k, rt, 0)
                assert b1 + b2 + b3 == g_poly(k, rt) >= 0


class TestNonnegativity:
    def test_right_endpoint_value(self):
        assert poly_value(4, 2, Fr(1, 3)) == Fr(50, 81)
        assert p_direct(4, 2, Fr(1, 3)) == Fr(50, 81)

    def test_zero_at_origin(self):
        assert poly_value(9, Fr(5, 2), 0) == 0

    def test_sampled_minimum(self):
        assert verify_poly_nonneg(16, 4, samples=1000) >= 0
        assert verify_poly_nonneg(4, 2) == 0.0

    def test_samples_validated(self):
        with pytest.raises(ValueError):
            verify_poly_nonneg(4, 2, samples=1)


class TestPinelis:
    def test_k4_r2(self):
        res = verify_pinelis_inequality(4, 2, exact_arith=True)
        assert (res.lhs, res.rhs) == (Fr(100, 81), Fr(350, 243))
        flt = verify_pinelis_inequality(4, 2)
        assert flt.lhs == pytest.approx(1.2346, abs=1e-4)

    @pytest.mark.parametrize("k", [1, 2, 7, 40])
    def test_r_equals_k_is_zero(self, k):
        res = verify_pinelis_inequality(k, k, exact_arith=True)
        assert res.lhs == res.rhs == 0

    @pytest.mark.parametrize("k", [2, 5, 31])
    def test_r_one_is_tight(self, k):
        # both sides equal (2K/(K+1))^K - 1
        res = verify_pinelis_inequality(k, 1, exact_arith=True)
        assert res.slack == 0
        assert res.rhs == Fr(2 * k, k + 1) ** k - 1

    @given(grid_cells)
    def test_integer_route_matches_rational(self, cell):
        k, r = cell
        assert pinelis_slack_exact(k, r) == verify_pinelis_inequality(k, r, exact_arith=True).slack

    def test_grid(self):
        sw = pinelis_grid(k_max=40)
        assert sw.passed and sw.zero_at_r_equals_k
        interior_zero = {r for k, r in sw.zero_cells if r != k}
        assert interior_zero <= {1}

    def test_domain(self):
        with pytest.raises(DomainError):
            verify_pinelis_inequality(3, Fr(1, 2))


class TestJFunction:
    def test_saturation(self):
        k, mu = 16, Fr(1, 8)
        r = k * (1 - 2 * mu)
        assert min((r + k * mu) / (1 - mu), k) == k
        j = j_function(r, k, mu)
        tail = sum(math.comb(k - 1, m) * mu ** m * (1 - mu) ** (k - 1 - m) / min(r + m, k) for m in range(k))
        assert j == k * tail

    def test_dominance_k16(self):
        rep = check_j_dominance(16, Fr(1, 8), range(1, 13))
        assert rep.passed and rep.worst_r == 1

    def test_domain(self):
        with pytest.raises(DomainError):
            j_function(1, 4, 0)
        with pytest.raises(DomainError):
            j_function(Fr(1, 2), 4, Fr(1, 2))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 20), st.integers(1, 15))
    def test_dominance_random(self, k, i):
        assert check_j_dominance(k, Fr(i, 16)).passed


SIXTEEN = dict(num_rx=16, num_files=16, packets_per_file=1, mu_t=Fr(1, 2), mu_r=Fr(1, 16))


class TestTradeoff:
    @pytest.mark.parametrize("scheme", ["centralized", "decentralized"])
    def test_no_loss_needs_no_memory(self, scheme):
        pts = tradeoff_curve(NetworkConfig(8, **SIXTEEN), scheme, [0.0])
        assert pts[0].delta_r == 0

    @pytest.mark.parametrize("scheme", ["centralized", "decentralized"])
    def test_curves_monotone_and_ordered(self, scheme):
        grid = np.linspace(0, 1, 101)
        c8 = tradeoff_curve(NetworkConfig(8, **SIXTEEN), scheme, grid)
        c16 = tradeoff_curve(NetworkConfig(16, **SIXTEEN), scheme, grid)
        for curve in (c8, c16):
            vals = [p.delta_r for p in curve]
            assert all(v is not None for v in vals)
            assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
        assert all(a.delta_r <= b.delta_r + 1e-9 for a, b in zip(c8, c16))

    def test_root_satisfies_equality(self):
        cfg = NetworkConfig(16, **SIXTEEN)
        target = float(delivery_time(cfg, "centralized"))
        for pt in tradeoff_curve(cfg, "centralized", [0.02, 0.05, 0.1, 0.3]):
            c = NetworkConfig(16, 16, 16, 1, 0.5, 1 / 16 + pt.delta_r, 1 - pt.alpha_bar)
            assert abs(float(delivery_time(c, "centralized")) - target) <= 1e-8 * target

    def test_csit_worthless_with_one_transmitter(self):
        # cooperation and multicast blocks have the same size, so losing CSIT costs nothing
        cfg = NetworkConfig(1, 4, 4, 1, 1, Fr(1, 4))
        assert all(p.delta_r == 0 for p in tradeoff_curve(cfg, "centralized", [0.5, 1.0]))


class TestWeightedSums:
    def test_sixteen_nodes(self):
        assert weighted_sum_check(NetworkConfig(16, **SIXTEEN), [0, Fr(3, 10), 1])

    def test_float_inputs(self):
        cfg = NetworkConfig(16, 16, 16, 1, 0.5, 0.0625)
        assert weighted_sum_check(cfg, [0.3, 0.7])
