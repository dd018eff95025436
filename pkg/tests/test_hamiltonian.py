import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torspec import (
    FieldMode,
    HamiltonianVariant,
    TorusShape,
    assemble,
    evaluate_coefficients,
    flux_from_tesla,
)

PRINTED = HamiltonianVariant.AS_PRINTED
REDERIVED = HamiltonianVariant.REDERIVED


def test_nu_must_be_integer():
    FieldMode(gamma=0.0, nu=3)
    FieldMode(gamma=0.0, nu=2.0)  # integral float accepted
    with pytest.raises(TypeError):
        FieldMode(gamma=0.0, nu=0.5)


def test_variant_parsing():
    assert FieldMode(0.0, 0, variant="printed").variant is PRINTED
    assert FieldMode(0.0, 0, variant="rederived").variant is REDERIVED
    with pytest.raises(ValueError):
        FieldMode(0.0, 0, variant="bogus")


class TestAssemble:
    def test_zero_bracket(self):
        # circular, nu = gamma = 0, curvature off: potential vanishes identically
        coeffs = assemble(TorusShape(0.5, 0.5), FieldMode(0.0, 0, curvature_on=False))
        th = np.linspace(0, 2 * np.pi, 100)
        assert np.allclose(coeffs.potential(th), 0.0, atol=1e-15)
        assert np.allclose(coeffs.drift(th), 0.5 * np.sin(th) / (1 + 0.5 * np.cos(th)), atol=1e-15)

    def test_azimuthal_kinetic_term_circular(self):
        coeffs = assemble(TorusShape(0.5, 0.5), FieldMode(0.0, 1, curvature_on=False))
        for th in [0.0, 0.7, 2.2]:
            f = 1 + 0.5 * math.cos(th)
            assert coeffs.potential(th) == pytest.approx(0.25 / f**2, rel=1e-13)

    def test_diamagnetic_term(self):
        coeffs = assemble(TorusShape(0.5, 0.5), FieldMode(1.0, 0, curvature_on=False))
        assert coeffs.potential(math.pi / 2) == pytest.approx(0.0625, rel=1e-12)

    def test_weight_is_d_times_f(self):
        coeffs = assemble(TorusShape(0.4, 0.9), FieldMode(0.0, 0))
        for th in [0.0, 1.0, 3.5]:
            d = math.sqrt(0.16 * math.sin(th) ** 2 + 0.81 * math.cos(th) ** 2)
            assert coeffs.weight(th) == pytest.approx(d * (1 + 0.4 * math.cos(th)), rel=1e-13)

    def test_circular_variant_identity_without_curvature(self):
        shape = TorusShape(0.5, 0.5)
        cp = assemble(shape, FieldMode(0.8, 2, curvature_on=False, variant=PRINTED))
        cr = assemble(shape, FieldMode(0.8, 2, curvature_on=False, variant=REDERIVED))
        th = np.linspace(-7, 7, 500)
        np.testing.assert_allclose(cp.drift(th), cr.drift(th), atol=1e-15)
        np.testing.assert_allclose(cp.potential(th), cr.potential(th), atol=1e-15)

    def test_circular_drift_identity_any_curvature(self):
        shape = TorusShape(0.35, 0.35)
        cp = assemble(shape, FieldMode(0.3, 1, curvature_on=True, variant=PRINTED))
        cr = assemble(shape, FieldMode(0.3, 1, curvature_on=True, variant=REDERIVED))
        th = np.linspace(0, 2 * np.pi, 300)
        np.testing.assert_allclose(cp.drift(th), cr.drift(th), atol=1e-15)

    def test_rederived_drift_odd_potential_even(self):
        coeffs = assemble(TorusShape(0.5, 0.1), FieldMode(0.7, 3, curvature_on=True, variant=REDERIVED))
        th = np.random.default_rng(7).uniform(-10, 10, 1000)
        np.testing.assert_allclose(coeffs.drift(-th), -coeffs.drift(th), atol=1e-13)
        np.testing.assert_allclose(coeffs.potential(-th), coeffs.potential(th), rtol=0, atol=1e-13)

    def test_printed_potential_even(self):
        coeffs = assemble(TorusShape(0.5, 0.1), FieldMode(0.7, 3, curvature_on=True, variant=PRINTED))
        th = np.random.default_rng(8).uniform(-10, 10, 1000)
        np.testing.assert_allclose(coeffs.potential(-th), coeffs.potential(th), rtol=0, atol=1e-13)

    @settings(max_examples=40)
    @given(
        st.floats(min_value=0.05, max_value=0.9),
        st.floats(min_value=0.05, max_value=1.5),
        st.floats(min_value=-2.0, max_value=2.0),
        st.integers(min_value=-5, max_value=5),
        st.floats(min_value=-4.0, max_value=4.0),
    )
    def test_paramagnetic_sign_flip(self, alpha, beta, gamma, nu, th):
        # nu -> -nu flips only the term linear in gamma*nu
        shape = TorusShape(alpha, beta)
        plus = assemble(shape, FieldMode(gamma, nu, curvature_on=True))
        minus = assemble(shape, FieldMode(gamma, -nu, curvature_on=True))
        d = math.sqrt((alpha * math.sin(th)) ** 2 + (beta * math.cos(th)) ** 2)
        expected = 2.0 * gamma * nu * alpha * d
        assert plus.potential(th) - minus.potential(th) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_circular_azimuthal_structure_factors(self):
        # for alpha = beta the three field terms combine into alpha^2 (nu/F + gamma F/2)^2
        alpha, gamma, nu = 0.5, 0.9, 2
        coeffs = assemble(TorusShape(alpha, alpha), FieldMode(gamma, nu, curvature_on=False))
        for th in np.linspace(0, 2 * np.pi, 50):
            f = 1 + alpha * math.cos(th)
            expected = alpha**2 * (nu / f + gamma * f / 2.0) ** 2
            assert coeffs.potential(th) == pytest.approx(expected, rel=1e-12)

    def test_drift_period_integral_closed_forms(self):
        shape = TorusShape(0.5, 0.1)
        cp = assemble(shape, FieldMode(0.0, 0, variant=PRINTED))
        assert cp.drift_period_integral == pytest.approx(2 * math.pi * 0.24 / 0.05, rel=1e-12)
        cr = assemble(shape, FieldMode(0.0, 0, variant=REDERIVED))
        assert cr.drift_period_integral == 0.0
        # quadrature cross-check
        th = np.arange(8192) * (2 * np.pi / 8192)
        g, _ = evaluate_coefficients(cp, th)
        assert g.sum() * 2 * np.pi / 8192 == pytest.approx(cp.drift_period_integral, rel=1e-10)

    def test_evaluate_coefficients_matches_callables(self):
        coeffs = assemble(TorusShape(0.3, 0.7), FieldMode(1.1, -2, curvature_on=True, variant=PRINTED))
        th = np.linspace(0, 2 * np.pi, 257)
        g, v = evaluate_coefficients(coeffs, th)
        np.testing.assert_allclose(g, coeffs.drift(th), rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(v, coeffs.potential(th), rtol=1e-14, atol=1e-14)


class TestFluxConversion:
    def test_zero(self):
        assert flux_from_tesla(0.0) == 0.0

    def test_one_tesla(self):
        assert flux_from_tesla(1.0) == pytest.approx(0.263, abs=1e-15)

    def test_linear(self):
        assert flux_from_tesla(4.0) == pytest.approx(1.052, abs=1e-15)
