import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torspec import (
    HamiltonianVariant,
    TorusShape,
    curvature_potential,
    curvatures,
    frame_self_check,
    profile,
)

PRINTED = HamiltonianVariant.AS_PRINTED
REDERIVED = HamiltonianVariant.REDERIVED

shapes_st = st.tuples(
    st.floats(min_value=0.02, max_value=0.95),
    st.floats(min_value=0.02, max_value=2.0),
).map(lambda ab: TorusShape(alpha=ab[0], beta=ab[1]))


class TestTorusShape:
    def test_validation(self):
        with pytest.raises(ValueError):
            TorusShape(alpha=0.0, beta=0.5)
        with pytest.raises(ValueError):
            TorusShape(alpha=0.5, beta=-0.1)
        with pytest.raises(ValueError):
            TorusShape(alpha=1.0, beta=0.5)

    def test_circular_predicate(self):
        assert TorusShape(0.5, 0.5).circular()
        assert TorusShape(0.5, 0.5 + 1e-13).circular()
        assert not TorusShape(0.5, 0.1).circular()

    def test_default_major_radius(self):
        assert TorusShape(0.5, 0.1).major_radius_angstrom == 500.0


class TestProfile:
    def test_circular_cross_section_constant_d(self):
        p = profile(TorusShape(0.5, 0.5), 1.234)
        assert p.D == pytest.approx(0.5, abs=1e-15)
        assert p.F == pytest.approx(1 + 0.5 * math.cos(1.234), abs=1e-15)

    def test_theta_zero(self):
        p = profile(TorusShape(0.5, 0.1), 0.0)
        assert p.D == pytest.approx(0.1, abs=1e-15)
        assert p.F == pytest.approx(1.5, abs=1e-15)

    def test_theta_half_pi(self):
        p = profile(TorusShape(0.5, 0.1), math.pi / 2)
        assert p.D == pytest.approx(0.5, abs=1e-15)
        assert p.F == pytest.approx(1.0, abs=1e-12)

    def test_p_is_d_over_alpha(self):
        shape = TorusShape(0.4, 0.7)
        for th in np.linspace(0, 2 * np.pi, 17):
            s = profile(shape, th)
            assert s.p == pytest.approx(s.D / 0.4, rel=1e-14)

    def test_derivative_fields(self):
        shape = TorusShape(0.3, 0.8)
        h = 1e-6
        for th in [0.3, 1.1, 2.9, 4.2]:
            s = profile(shape, th)
            dF_num = (profile(shape, th + h).F - profile(shape, th - h).F) / (2 * h)
            dlogD_num = (
                math.log(profile(shape, th + h).D) - math.log(profile(shape, th - h).D)
            ) / (2 * h)
            assert s.dF == pytest.approx(dF_num, abs=1e-8)
            assert s.dlogD == pytest.approx(dlogD_num, abs=1e-7)

    @settings(max_examples=50)
    @given(shapes_st, st.floats(min_value=-10.0, max_value=10.0))
    def test_symmetry_and_periodicity(self, shape, th):
        s = profile(shape, th)
        assert profile(shape, -th).D == pytest.approx(s.D, rel=1e-12)
        assert profile(shape, th + 2 * np.pi).D == pytest.approx(s.D, rel=1e-9)
        assert profile(shape, -th).F == pytest.approx(s.F, rel=1e-12)
        assert profile(shape, -th).dF == pytest.approx(-s.dF, rel=1e-12, abs=1e-12)
        assert profile(shape, -th).dlogD == pytest.approx(-s.dlogD, rel=1e-12, abs=1e-12)

    def test_d_range_equals_semiaxes(self):
        shape = TorusShape(0.5, 0.1)
        th = np.linspace(0, 2 * np.pi, 4001)
        d = profile(shape, th).D
        assert d.min() == pytest.approx(0.1, abs=1e-6)
        assert d.max() == pytest.approx(0.5, abs=1e-6)
        assert profile(shape, th).F.min() > 0


class TestCurvatures:
    def test_circular_theta_zero(self):
        c = curvatures(TorusShape(0.5, 0.5), 0.0)
        assert c.kappa_theta == pytest.approx(2.0, rel=1e-14)
        assert c.kappa_phi == pytest.approx(0.5 / (1.5 * 0.5), rel=1e-14)

    def test_flat_shape_theta_zero(self):
        c = curvatures(TorusShape(0.5, 0.1), 0.0)
        assert c.kappa_theta == pytest.approx(50.0, rel=1e-12)

    def test_kappa_phi_vanishes_at_top(self):
        for shape in [TorusShape(0.5, 0.1), TorusShape(0.1, 0.5), TorusShape(0.3, 0.3)]:
            assert curvatures(shape, math.pi / 2).kappa_phi == pytest.approx(0.0, abs=1e-15)

    def test_circular_kappa_theta_constant(self):
        shape = TorusShape(0.4, 0.4)
        for th in np.linspace(0, 2 * np.pi, 11):
            assert curvatures(shape, th).kappa_theta == pytest.approx(1 / 0.4, rel=1e-13)


class TestCurvaturePotential:
    def test_printed_circular_top(self):
        u = curvature_potential(TorusShape(0.5, 0.5), math.pi / 2, PRINTED)
        assert u == pytest.approx(-0.25, abs=1e-12)

    def test_printed_flat_theta_zero(self):
        u = curvature_potential(TorusShape(0.5, 0.1), 0.0, PRINTED)
        assert u == pytest.approx(-6.2511111111, abs=1e-9)

    def test_rederived_circular_matches_inverse_square(self):
        # for alpha = beta the da Costa form collapses to -1/(4 F^2)
        shape = TorusShape(0.5, 0.5)
        for th in np.linspace(0, 2 * np.pi, 13):
            u = curvature_potential(shape, th, REDERIVED)
            f = 1 + 0.5 * math.cos(th)
            assert u == pytest.approx(-1.0 / (4 * f * f), rel=1e-12)
        assert curvature_potential(shape, 0.0, REDERIVED) == pytest.approx(-1.0 / 9.0, abs=1e-12)

    def test_variants_coincide_at_top_for_circular(self):
        shape = TorusShape(0.5, 0.5)
        for th in (math.pi / 2, -math.pi / 2):
            up = curvature_potential(shape, th, PRINTED)
            ur = curvature_potential(shape, th, REDERIVED)
            assert up == pytest.approx(-0.25, abs=1e-12)
            assert ur == pytest.approx(-0.25, abs=1e-12)

    @settings(max_examples=60)
    @given(shapes_st, st.floats(min_value=-7.0, max_value=7.0))
    def test_nonpositive_and_even(self, shape, th):
        for variant in (PRINTED, REDERIVED):
            u = curvature_potential(shape, th, variant)
            assert u <= 0.0
            assert curvature_potential(shape, -th, variant) == pytest.approx(u, rel=1e-12, abs=1e-14)


class TestFrameSelfCheck:
    def test_rejects_bad_step(self):
        shape = TorusShape(0.5, 0.5)
        with pytest.raises(ValueError):
            frame_self_check(shape, 0.7, h=0.0)
        with pytest.raises(ValueError):
            frame_self_check(shape, 0.7, h=-1e-6)
        with pytest.raises(ValueError):
            frame_self_check(shape, 0.7, h=1e-3)

    def test_circular(self):
        assert frame_self_check(TorusShape(0.5, 0.5), 0.7, h=1e-5) < 1e-6

    def test_flat_sharp_point(self):
        shape = TorusShape(0.5, 0.1)
        residual = frame_self_check(shape, 0.0, h=1e-5)
        assert residual < 1e-4 * curvatures(shape, 0.0).kappa_theta

    def test_tall_at_pi(self):
        assert frame_self_check(TorusShape(0.1, 0.5), math.pi, h=1e-5) < 1e-6

    def test_second_order_convergence(self):
        # truncation-dominated steps: quartering h should cut the residual ~16x
        shape = TorusShape(0.3, 0.6)
        r1 = frame_self_check(shape, 0.9, h=1e-4)
        r2 = frame_self_check(shape, 0.9, h=2.5e-5)
        assert r2 < r1 / 8.0
