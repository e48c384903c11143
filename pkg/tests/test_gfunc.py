import math
import warnings

import numpy as np
import pytest

from grushin.errors import DomainError
from grushin.gfunc import (
    EquivalenceReport,
    GFunctionSpec,
    g_k_eval,
    g_norm_equivalence_report,
    g_star_cell_bound,
    g_star_eval,
    slice_lp_norm,
)
from grushin.hermite import (
    HermiteSlice,
    analysis_points,
    analysis_weights,
    hermite_eval,
    simplex_mask,
)
from grushin.normlab import make_test_slice

from oracles import brute_force_g_star


class TestGk:
    def test_zero_slice(self):
        sl = HermiteSlice.zeros(1.0, 6, 1)
        pts = analysis_points(1.0, 6)
        assert np.all(g_k_eval(GFunctionSpec(k=1), sl, pts) == 0)

    def test_single_mode_pointwise_half(self):
        # g_1 of one eigenmode is |Phi(x)|/2: mu^2 integral t e^(-2 t mu) dt = 1/4
        for lam, alpha in ((1.0, 2), (2.0, 0)):
            sl = HermiteSlice.unit(lam, 6, (alpha,))
            pts = analysis_points(lam, 6)
            g1 = g_k_eval(GFunctionSpec(k=1), sl, pts)
            target = 0.5 * np.abs(hermite_eval((alpha,), lam, pts))
            np.testing.assert_allclose(g1, target, atol=1e-8)

    def test_l2_constant_half_random(self, rng):
        for i, lam in enumerate((0.5, 1.0, 4.0)):
            sl = make_test_slice(lam, 8, 8, 50 + i, 1.0)
            pts = analysis_points(lam, 8)
            w = analysis_weights(lam, 8)
            g1 = g_k_eval(GFunctionSpec(k=1), sl, pts)
            norm = np.sqrt(np.sum(w * g1**2))
            assert norm == pytest.approx(0.5 * sl.l2_norm(), rel=1e-6)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_modewise_gamma_constant(self, k):
        sl = make_test_slice(1.0, 8, 8, 7, 1.0)
        pts = analysis_points(1.0, 8)
        w = analysis_weights(1.0, 8)
        gk = g_k_eval(GFunctionSpec(k=k), sl, pts)
        ratio2 = np.sum(w * gk**2) / sl.l2_norm() ** 2
        assert ratio2 == pytest.approx(math.gamma(2 * k) / 4.0**k, rel=1e-6)

    def test_2d_slice_supported(self):
        sl = HermiteSlice.unit(1.0, 3, (1, 0))
        pts = analysis_points(1.0, 3, n=2)
        g1 = g_k_eval(GFunctionSpec(k=1), sl, pts)
        target = 0.5 * np.abs(
            hermite_eval((1, 0), 1.0, pts)
        )
        np.testing.assert_allclose(g1, target, atol=1e-8)


class TestGStar:
    def test_zero_slice(self):
        sl = HermiteSlice.zeros(1.0, 5, 1)
        vals = g_star_eval(GFunctionSpec(k=1), sl, np.array([0.0, 0.5]))
        assert np.all(vals == 0)

    def test_monotone_in_order_on_shared_quadrature(self, rng):
        sl = make_test_slice(1.0, 8, 8, 11, 1.0)
        pts = np.linspace(-2, 2, 9)
        g1 = g_star_eval(GFunctionSpec(k=1), sl, pts)
        g2 = g_star_eval(GFunctionSpec(k=2), sl, pts)
        g3 = g_star_eval(GFunctionSpec(k=3), sl, pts)
        assert np.all(g2 <= g1 + 1e-15)
        assert np.all(g3 <= g2 + 1e-15)

    def test_brute_force_oracle_single_mode(self):
        lam, K = 1.0, 8
        sl = HermiteSlice.unit(lam, K, (2,))
        mine = g_star_eval(GFunctionSpec(k=1), sl, np.array([0.0]))[0]
        mask = simplex_mask(K, 1)
        brute2 = brute_force_g_star(
            sl.coeffs[mask], sl.spectral_values[mask], lam, 1, 0.0, K
        )
        assert mine == pytest.approx(np.sqrt(brute2), rel=1e-4)

    def test_low_order_warns(self):
        sl = HermiteSlice.unit(1.0, 3, (0, 0))
        with pytest.warns(UserWarning, match="n/2"):
            g_star_eval(GFunctionSpec(k=1), sl, np.array([[0.0, 0.0]]))

    def test_cell_bound_recovers_g1(self):
        sl = make_test_slice(1.0, 8, 8, 13, 1.0)
        pts = np.linspace(-1.5, 1.5, 7)
        restricted, c_grid = g_star_cell_bound(GFunctionSpec(k=1), sl, pts)
        g1 = g_k_eval(GFunctionSpec(k=1), sl, pts)
        np.testing.assert_allclose(restricted, c_grid * g1**2, rtol=1e-12)
        full = g_star_eval(GFunctionSpec(k=1), sl, pts) ** 2
        assert np.all(restricted <= full + 1e-15)


class TestEquivalence:
    def test_single_modes_pin_both_constants_at_p2(self):
        family = [HermiteSlice.unit(1.0, 6, (k,)) for k in range(4)]
        rep = g_norm_equivalence_report(family, p=2.0)
        assert rep.c_lower == pytest.approx(0.5, abs=1e-4)
        assert rep.c_upper == pytest.approx(0.5, abs=1e-4)

    def test_zero_functions_are_skipped(self):
        family = [HermiteSlice.zeros(1.0, 4, 1), HermiteSlice.unit(1.0, 4, (0,))]
        rep = g_norm_equivalence_report(family, p=2.0)
        assert rep.c_lower > 0

    def test_empty_family_rejected(self):
        with pytest.raises(DomainError):
            g_norm_equivalence_report([], p=2.0)

    def test_lambda_spread_small_for_matched_draws(self):
        family = [
            make_test_slice(lam, 8, 8, 1000 + j, 1.0)
            for lam in (0.5, 1.0, 2.0, 4.0)
            for j in range(5)
        ]
        rep = g_norm_equivalence_report(family, p=4.0)
        assert rep.lambda_stable
        assert rep.spread_lower < 0.25 and rep.spread_upper < 0.25

    def test_report_serializes(self):
        family = [HermiteSlice.unit(1.0, 4, (0,))]
        doc = g_norm_equivalence_report(family, p=2.0).to_dict()
        assert doc["schema"] == "grushin.equivalence-report/1"


class TestSliceNorms:
    def test_lp_rejects_endpoints(self):
        with pytest.raises(DomainError):
            slice_lp_norm(np.ones(4), 1.0, 1, p=1.0)

    def test_p2_matches_coefficients(self, rng):
        sl = make_test_slice(2.0, 6, 6, 21, 1.0)
        pts = analysis_points(2.0, 6)
        from grushin.hermite import hermite_synthesize

        vals = hermite_synthesize(sl, pts)
        assert slice_lp_norm(vals, 2.0, 6, p=2.0) == pytest.approx(
            sl.l2_norm(), rel=1e-12
        )
