import numpy as np
import pytest

from grushin.calculus import (
    OVERFLOW_THRESHOLD,
    ScalarSymbol,
    apply_scalar_multiplier,
    fractional_power_apply,
    hormander_check,
    named_symbol,
)
from grushin.errors import DomainError, EvaluationError
from grushin.hermite import HermiteSlice
from grushin.transform import SpectralCoefficients, apply_grushin

from oracles import rational_symbol_derivative, semigroup_inverse_sqrt
from test_transform import coefficients_from


@pytest.fixture
def coeffs(small_grid, rng):
    content = {
        m: rng.standard_normal(6) + 1j * rng.standard_normal(6) for m in (-2, 1, 3)
    }
    return coefficients_from(small_grid, 8, content)


class TestMultiplier:
    def test_identity_symbol(self, coeffs):
        out = apply_scalar_multiplier(named_symbol("one"), coeffs)
        for m in coeffs.slices:
            np.testing.assert_array_equal(out.slice_at(m).coeffs, coeffs.slice_at(m).coeffs)

    def test_heat_composition(self, coeffs):
        heat = lambda s: named_symbol(f"heat:{s}")
        composed = apply_scalar_multiplier(heat(0.7), apply_scalar_multiplier(heat(0.3), coeffs))
        direct = apply_scalar_multiplier(heat(1.0), coeffs)
        for m in coeffs.slices:
            np.testing.assert_allclose(
                composed.slice_at(m).coeffs, direct.slice_at(m).coeffs, rtol=1e-14
            )

    def test_mu_symbol_matches_grushin_exactly(self, coeffs):
        sym = ScalarSymbol(func=lambda mu: mu, name="mu")
        via_symbol = apply_scalar_multiplier(sym, coeffs)
        via_operator = apply_grushin(coeffs)
        for m in coeffs.slices:
            np.testing.assert_array_equal(
                via_symbol.slice_at(m).coeffs, via_operator.slice_at(m).coeffs
            )

    def test_homomorphism_product_and_sum(self, coeffs):
        m1 = named_symbol("rational")
        m2 = named_symbol("heat:0.4")
        prod = ScalarSymbol(func=lambda mu: m1.value(mu) * m2.value(mu), name="prod")
        lhs = apply_scalar_multiplier(m1, apply_scalar_multiplier(m2, coeffs))
        rhs = apply_scalar_multiplier(prod, coeffs)
        for m in coeffs.slices:
            np.testing.assert_allclose(
                lhs.slice_at(m).coeffs, rhs.slice_at(m).coeffs, rtol=1e-14
            )

    def test_self_adjointness_real_symbol(self, small_grid, rng):
        sym = named_symbol("rational")
        a = coefficients_from(
            small_grid, 6, {1: rng.standard_normal(5) + 1j * rng.standard_normal(5)}
        )
        b = coefficients_from(
            small_grid, 6, {1: rng.standard_normal(5) + 1j * rng.standard_normal(5)}
        )
        ma = apply_scalar_multiplier(sym, a)
        mb = apply_scalar_multiplier(sym, b)
        inner = lambda u, v: sum(
            np.vdot(u.slice_at(m).coeffs, v.slice_at(m).coeffs) for m in u.slices
        )
        assert inner(ma, b) == pytest.approx(inner(a, mb), rel=1e-12)

    def test_error_names_offending_point(self, coeffs):
        sym = ScalarSymbol(func=lambda mu: 1.0 / (mu - mu), name="bad")
        with pytest.raises(EvaluationError, match="mu="):
            apply_scalar_multiplier(sym, coeffs)

    def test_semigroup_kernel_positive_and_matches_mehler(self):
        from grushin.hermite import analysis_points, hermite_synthesize, mehler_kernel

        lam, K, s = 1.0, 40, 0.5
        pts = analysis_points(lam, K)[40:60]
        y0 = 0.1
        factors = np.exp(-s * (2 * np.arange(K + 1) + 1) * lam)
        from grushin.hermite import hermite_functions

        # kernel row: sum_k e^(-s nu_k) Phi_k(x) Phi_k(y0)
        col = lam**0.25 * hermite_functions(K, np.sqrt(lam) * np.array([y0]))[:, 0]
        sl = HermiteSlice(lam=lam, K=K, coeffs=factors * col)
        row = hermite_synthesize(sl, pts).real
        target = mehler_kernel(s, lam, pts, np.full_like(pts, y0))
        assert np.all(row > 0)
        np.testing.assert_allclose(row, target, atol=1e-8)


class TestFractionalPower:
    def test_simple_factor(self, small_grid):
        # mode with spectral value 4: T = 2 pi, lam_4 = 4, degree 0: (2*0+1)*4
        c = coefficients_from(small_grid, 4, {4: [1.0]})
        out = fractional_power_apply(-0.5, c)
        assert out.slice_at(4).coeff((0,)) == pytest.approx(0.5)

    def test_inverse_square_root_squares_to_inverse(self, coeffs):
        out = apply_grushin(
            fractional_power_apply(-0.5, fractional_power_apply(-0.5, coeffs))
        )
        for m in coeffs.slices:
            np.testing.assert_allclose(
                out.slice_at(m).coeffs, coeffs.slice_at(m).coeffs, rtol=1e-12, atol=1e-15
            )

    @pytest.mark.parametrize("mu", [1.0, 3.0, 10.0])
    def test_semigroup_integral_oracle(self, mu):
        assert semigroup_inverse_sqrt(mu) == pytest.approx(mu**-0.5, rel=1e-6)


class TestFiniteDifferences:
    def test_matches_analytic_derivatives(self):
        sym_plain = ScalarSymbol(func=lambda mu: 1.0 / (1.0 + mu), name="plain")
        mu = np.logspace(0, 3, 41)
        for k in (1, 2, 3, 4):
            fd = sym_plain.derivative(k, mu)
            exact = rational_symbol_derivative(k, mu)
            assert np.abs((fd - exact) / exact).max() < 1e-6

    def test_analytic_derivatives_preferred(self):
        marker = []

        def d1(mu):
            marker.append(True)
            return -((1 + mu) ** -2.0)

        sym = ScalarSymbol(func=lambda mu: 1 / (1 + mu), derivatives=(d1,), name="s")
        sym.derivative(1, np.array([2.0]))
        assert marker


class TestHormander:
    def test_rational_bounded_with_derived_suprema(self):
        rep = hormander_check(named_symbol("rational"), N=2, mu_range=(1.0, 1e4),
                              samples=161)
        assert rep.bounded
        mu = np.logspace(0, 4, 161)
        derived = [
            np.max(1 / (1 + mu)),
            np.max(mu / (1 + mu) ** 2),
            np.max(2 * mu**2 / (1 + mu) ** 3),
        ]
        for got, want in zip(rep.sup_values, derived):
            assert got == pytest.approx(want, rel=5e-2)
        # true suprema: 1/2 at mu=1, 1/4 at mu=1, 8/27 at mu=2
        assert rep.sup_values[0] == pytest.approx(0.5, rel=0.05)
        assert rep.sup_values[1] == pytest.approx(0.25, rel=0.05)
        assert rep.sup_values[2] == pytest.approx(8 / 27, rel=0.05)

    def test_imaginary_power_constants(self):
        tau = 2.0
        rep = hormander_check(named_symbol("imaginary-power:2"), N=2,
                              mu_range=(1.0, 1e4), samples=161)
        assert rep.bounded
        expected = [1.0, abs(1j * tau), abs(1j * tau) * abs(1j * tau - 1)]
        for got, want in zip(rep.sup_values, expected):
            assert got == pytest.approx(want, rel=5e-2)

    def test_exponential_unbounded(self):
        sym = ScalarSymbol(func=lambda mu: np.exp(mu), name="exp")
        rep = hormander_check(sym, N=1, mu_range=(1.0, 1e6), samples=65)
        assert not rep.bounded
        assert rep.sup_values[0] >= OVERFLOW_THRESHOLD or not np.isfinite(rep.sup_values[0])

    def test_rejects_bad_range(self):
        with pytest.raises(DomainError):
            hormander_check(named_symbol("one"), N=1, mu_range=(-1.0, 10.0))

    def test_nan_symbol_is_evaluation_error(self):
        sym = ScalarSymbol(func=lambda mu: np.where(mu > 10, np.nan, 1.0), name="nan")
        with pytest.raises(EvaluationError):
            hormander_check(sym, N=1, mu_range=(1.0, 100.0), samples=33)


class TestNamedSymbols:
    def test_unknown_symbol(self):
        with pytest.raises(DomainError):
            named_symbol("mystery")

    def test_heat_requires_positive_parameter(self):
        with pytest.raises(DomainError):
            named_symbol("heat:-1")

    def test_cesaro_truncates(self):
        sym = named_symbol("cesaro-delta:1.5")
        vals = sym.value(np.array([0.5, 1.0, 2.0]))
        assert vals[0] == pytest.approx(0.5**1.5)
        assert vals[1] == 0.0 and vals[2] == 0.0
