import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grushin.bochner import (
    MaximalProfile,
    RieszMeanSpec,
    bochner_riesz_apply,
    bochner_riesz_slice_apply,
    default_r_set,
    hardy_littlewood_maximal,
    hermite_bochner_riesz,
    maximal_domination_check,
    truncated_power,
)
from grushin.errors import DataError, DomainError
from grushin.hermite import HermiteSlice
from grushin.normlab import fefferman_stein_probe, make_test_slice

from test_transform import coefficients_from


class TestMeans:
    def test_low_threshold_wipes_high_frequencies(self, small_grid, rng):
        # T = 2 pi means |lam_m| = |m| >= 1, so R = 1 leaves nothing
        content = {m: rng.standard_normal(4) for m in (1, -5, 9)}
        c = coefficients_from(small_grid, 5, content)
        out = bochner_riesz_apply(RieszMeanSpec(R=1.0, delta=2.0), c)
        assert out.coefficient_energy() == 0.0

    def test_simple_factor(self):
        sl = HermiteSlice.unit(0.5, 3, (0,))  # spectral value (2*0+1)*0.5
        out = bochner_riesz_slice_apply(RieszMeanSpec(R=1.0, delta=1.0), sl)
        assert out.coeff((0,)) == pytest.approx(0.5)

    def test_threshold_identity_on_spectrum(self, rng):
        # u (1-u)_+^d = (1-u)_+^d - (1-u)_+^(d+1) across random spectral values
        u = rng.uniform(0, 2, 20)
        d = 1.3
        lhs = u * truncated_power(u, d)
        rhs = truncated_power(u, d) - truncated_power(u, d + 1)
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-15)

    def test_sharp_cutoff_convention(self):
        vals = truncated_power(np.array([0.3, 1.0, 1.5]), 0.0)
        assert vals[0] == 1.0
        assert vals[1] == 0.0  # the boundary belongs to the wiped side
        assert vals[2] == 0.0

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 3.0), st.floats(0.0, 2.5), st.floats(0.0, 2.5))
    def test_truncated_power_algebra(self, u, d1, d2):
        prod = truncated_power(u, d1) * truncated_power(u, d2)
        combined = truncated_power(u, d1 + d2)
        assert prod == pytest.approx(combined, rel=1e-12, abs=1e-300)


class TestHermiteMeans:
    def test_small_threshold_gives_zero(self):
        sl = HermiteSlice.unit(1.0, 4, (0,))
        out = hermite_bochner_riesz(RieszMeanSpec(R=0.9, delta=1.0), sl)
        assert out.l2_norm() == 0.0

    def test_large_threshold_sharp_cutoff_is_identity(self, rng):
        coeffs = rng.standard_normal(5)
        sl = HermiteSlice(lam=2.0, K=4, coeffs=coeffs)
        out = hermite_bochner_riesz(RieszMeanSpec(R=1000.0, delta=0.0), sl)
        np.testing.assert_array_equal(out.coeffs, sl.coeffs.astype(complex))

    def test_conjugation_identity_power_of_two(self, rng):
        delta = 1.3
        for lam in (0.5, 1.0, 2.0, 4.0):
            sl = make_test_slice(lam, 10, 10, 3, 0.8)
            lhs = bochner_riesz_slice_apply(RieszMeanSpec(R=1.0, delta=delta), sl)
            rhs = hermite_bochner_riesz(RieszMeanSpec(R=1.0 / lam, delta=delta), sl)
            np.testing.assert_array_equal(lhs.coeffs, rhs.coeffs)

    def test_conjugation_identity_generic_frequency(self):
        delta = 1.3
        for lam in (0.75, 3.0):
            sl = make_test_slice(lam, 10, 10, 3, 0.8)
            lhs = bochner_riesz_slice_apply(RieszMeanSpec(R=1.0, delta=delta), sl)
            rhs = hermite_bochner_riesz(RieszMeanSpec(R=1.0 / lam, delta=delta), sl)
            np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=3e-15, atol=1e-18)


class TestMaximal:
    def test_constant_function(self):
        g = np.full(256, 3.25)
        out = hardy_littlewood_maximal(g, h=0.1)
        np.testing.assert_allclose(out.values, 3.25, rtol=1e-12)

    def test_indicator_quarter_value(self):
        Nx, L = 512, 8.0
        h = 2 * L / Nx
        x = -L + h * np.arange(Nx)
        g = (np.abs(x) <= 1.0).astype(float)
        out = hardy_littlewood_maximal(g, h)
        ix = int(round((3.0 + L) / h))
        assert out.values[ix] == pytest.approx(0.25, rel=0.02)

    def test_dominates_pointwise(self, rng):
        g = rng.random(128)
        out = hardy_littlewood_maximal(g, h=0.05)
        assert np.all(out.values >= g - 1e-15)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_monotone_in_input(self, seed):
        r = np.random.default_rng(seed)
        g1 = r.random(64)
        g2 = g1 + r.random(64)
        m1 = hardy_littlewood_maximal(g1, h=0.1).values
        m2 = hardy_littlewood_maximal(g2, h=0.1).values
        assert np.all(m1 <= m2 + 1e-15)

    def test_monotone_under_radius_enrichment(self, rng):
        g = rng.random(128)
        few = hardy_littlewood_maximal(g, h=0.1, radii=[0.05, 0.4]).values
        more = hardy_littlewood_maximal(g, h=0.1, radii=[0.05, 0.2, 0.4, 1.6]).values
        assert np.all(few <= more + 1e-15)

    def test_rejects_negative_input(self):
        with pytest.raises(DomainError):
            hardy_littlewood_maximal(np.array([-1.0, 0.0]), h=0.1)

    def test_two_dimensional_disks(self):
        g = np.zeros((32, 32))
        g[16, 16] = 1.0
        out = hardy_littlewood_maximal(g, h=1.0)
        assert out.values[16, 16] == 1.0
        assert out.values[16, 18] > 0

    def test_profile_rejects_negative(self):
        with pytest.raises(DataError):
            MaximalProfile(values=np.array([-0.1]), radii_used=(1.0,))


class TestDomination:
    def test_zero_function(self):
        rep = maximal_domination_check(HermiteSlice.zeros(1.0, 8, 1), delta=1.0)
        assert rep.c_emp == 0.0
        assert rep.stable

    def test_ground_state_stable(self):
        rep = maximal_domination_check(HermiteSlice.unit(1.0, 8, (0,)), delta=1.0)
        assert np.isfinite(rep.c_emp) and rep.c_emp > 0
        assert rep.stable

    def test_one_sided_exceeds_two_sided_for_asymmetric_input(self):
        coeffs = np.zeros(9, dtype=complex)
        coeffs[0] = 1.0
        coeffs[1] = 0.9  # odd component shifts mass to one side
        rep = maximal_domination_check(HermiteSlice(lam=1.0, K=8, coeffs=coeffs), delta=1.0)
        assert rep.one_sided_max >= rep.c_emp

    def test_below_critical_order_warns_in_report(self):
        rep = maximal_domination_check(HermiteSlice.unit(1.0, 6, (0,)), delta=0.1)
        assert rep.warning

    def test_family_stability(self, rng):
        for i in range(4):
            sl = make_test_slice(1.0, 12, 9, 100 + i, 1.2)
            rep = maximal_domination_check(sl, delta=1.0)
            assert rep.stable and np.isfinite(rep.c_emp)


class TestRSet:
    def test_log_spacing_count(self):
        rs = default_r_set(1.0, 10.0)
        assert rs.size == 34
        assert rs[0] == pytest.approx(1.0) and rs[-1] == pytest.approx(10.0)

    def test_rejects_bad_range(self):
        with pytest.raises(DomainError):
            default_r_set(5.0, 1.0)


class TestFeffermanStein:
    def test_probe_stable_and_dominating(self):
        rep = fefferman_stein_probe(J=4, p=4.0, trials=6, seed=5, Nx=128, K=10, K_max=8)
        assert rep.stable
        # maximal averages dominate the function near its peaks, so the
        # vector ratio stays above a fixed floor
        assert rep.max_ratio > 0.5
        assert len(rep.ratios) == 6
