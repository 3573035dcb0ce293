import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qetlab.errors import (
    DegenerateProfile,
    GeometryViolation,
    ParameterViolation,
    SupportViolation,
)
from qetlab.profiles import (
    ProtocolGeometry,
    compact_bump,
    fourier_power,
    fourier_transform,
    gaussian,
    gradient_norm,
    gradient_norm_parseval,
    tabulated,
    validate_assignment,
)

SQRT_PI = math.sqrt(math.pi)


def _gaussian_table(sigma=1.0, n=801, span=8.0):
    xs = np.linspace(-span * sigma, span * sigma, n)
    return xs, np.exp(-0.5 * (xs / sigma) ** 2)


class TestFourier:
    def test_gaussian_power_closed_form(self):
        g = gaussian(0.0, 1.0, 1.0)
        assert fourier_power(g, 0.0) == pytest.approx(2.0 * math.pi, rel=1e-14)
        for w in (0.5, 1.0, 3.0):
            assert fourier_power(g, w) == pytest.approx(
                2.0 * math.pi * math.exp(-(w**2)), rel=1e-13
            )

    def test_decay_past_cutoff(self):
        # C1 profiles decay past their cutoff scale; the bump only like
        # exp(-sqrt(2 w)), so its cutoff sits much further out.
        assert fourier_power(gaussian(0.0, 1.0), 60.0) < 1e-14
        assert fourier_power(compact_bump(0.0, 1.0), 280.0) < 1e-14

    def test_tabulated_matches_analytic(self):
        xs, ys = _gaussian_table()
        tab = tabulated(xs, ys)
        for w in (0.0, 1.0, 2.0):
            analytic = 2.0 * math.pi * math.exp(-(w**2))
            assert abs(fourier_power(tab, w) - analytic) < 1e-6

    def test_center_enters_as_phase_only(self):
        g0 = gaussian(0.0, 1.0)
        g5 = gaussian(5.0, 1.0)
        w = np.array([0.3, 1.7])
        assert np.allclose(
            np.abs(fourier_transform(g0, w)), np.abs(fourier_transform(g5, w))
        )

    def test_negative_omega_rejected(self):
        with pytest.raises(ParameterViolation):
            fourier_power(gaussian(), -1.0)

    @settings(max_examples=20, deadline=None)
    @given(sigma=st.floats(0.5, 3.0), amp=st.floats(-2.0, 2.0).filter(lambda a: abs(a) > 0.1),
           w=st.floats(0.0, 5.0))
    def test_power_nonnegative(self, sigma, amp, w):
        assert fourier_power(gaussian(0.0, sigma, amp), w) >= 0.0

    def test_bump_transform_is_even_modulus(self):
        b = compact_bump(0.0, 1.5, 1.0)
        w = np.array([0.7, 2.1])
        # Real even profile: transform is real and even; power matches square.
        ft = fourier_transform(b, w)
        assert np.allclose(ft.imag, 0.0, atol=1e-12)
        assert np.allclose(fourier_power(b, w), ft.real**2, rtol=1e-10)


class TestGradientNorm:
    def test_unit_gaussian(self):
        assert gradient_norm(gaussian(0.0, 1.0)) == pytest.approx(
            SQRT_PI / 2.0, rel=1e-12
        )

    def test_amplitude_quadratic(self):
        g1 = gradient_norm(gaussian(0.0, 1.0, 1.0))
        g2 = gradient_norm(gaussian(0.0, 1.0, 2.0))
        assert g2 == pytest.approx(4.0 * g1, rel=1e-12)

    def test_sigma_scaling(self):
        assert gradient_norm(gaussian(0.0, 2.0)) == pytest.approx(
            SQRT_PI / 4.0, rel=1e-12
        )

    def test_translation_invariance(self):
        g = compact_bump(0.0, 1.3, 0.7)
        assert gradient_norm(g.translated(17.0)) == pytest.approx(
            gradient_norm(g), rel=1e-11
        )

    def test_parseval_identity_gaussian(self):
        for sigma, amp in ((0.7, 1.0), (1.0, -2.0), (2.5, 0.3)):
            g = gaussian(0.0, sigma, amp)
            assert gradient_norm_parseval(g) == pytest.approx(
                gradient_norm(g), rel=1e-8
            )

    def test_parseval_identity_tabulated(self):
        xs, ys = _gaussian_table(n=2001)
        tab = tabulated(xs, ys)
        assert gradient_norm_parseval(tab) == pytest.approx(
            gradient_norm(tab), rel=1e-6
        )

    def test_degenerate_rejected(self):
        xs = np.linspace(0.0, 1.0, 8)
        with pytest.raises((DegenerateProfile, ParameterViolation)):
            gradient_norm(tabulated(xs, np.zeros(8)))


class TestValidation:
    def test_accepts_contained_gaussian(self):
        geo = ProtocolGeometry(-8.0, 8.0, 9.0, 30.0)
        cfg = validate_assignment(gaussian(0.0, 1.0), gaussian(18.0, 1.0), geo)
        assert cfg.geometry.x2A == pytest.approx(-cfg.geometry.d)

    def test_rejects_outside_support(self):
        geo = ProtocolGeometry(1.0, 8.0, 9.0, 30.0)
        with pytest.raises(SupportViolation, match="gA"):
            validate_assignment(gaussian(0.0, 1.0), gaussian(18.0, 1.0), geo)

    def test_centering_convention(self):
        # Regions [-2,-1], [1,2] with T = 1: L = 2, d = 1.5 after centering.
        geo = ProtocolGeometry(-2.0, -1.0, 1.0, 2.0, T=1.0)
        b = compact_bump(-1.5, 0.4)
        b2 = compact_bump(1.5, 0.4)
        cfg = validate_assignment(b, b2, geo)
        assert cfg.geometry.L == pytest.approx(2.0)
        assert cfg.geometry.d == pytest.approx(1.5)
        assert cfg.geometry.x2A == pytest.approx(-1.5)
        assert cfg.geometry.x1B + cfg.geometry.T == pytest.approx(1.5)

    def test_geometry_ordering(self):
        with pytest.raises(GeometryViolation):
            ProtocolGeometry(0.0, -1.0, 1.0, 2.0)
        with pytest.raises(GeometryViolation):
            ProtocolGeometry(-2.0, -1.0, 1.0, 2.0, T=-0.5)

    def test_amplitude_nonzero(self):
        with pytest.raises(ParameterViolation):
            gaussian(0.0, 1.0, 0.0)

    def test_signed_profile_flagged(self):
        assert gaussian(0.0, 1.0, -1.0).is_signed
        xs = np.linspace(-1, 1, 64)
        assert tabulated(xs, np.sin(3 * xs)).changes_sign


class TestTabulated:
    def test_endpoints_forced_zero(self):
        xs = np.linspace(-2.0, 2.0, 33)
        ys = np.full(33, 0.5)
        tab = tabulated(xs, ys)
        assert tab(np.array([-2.0, 2.0])) == pytest.approx([0.0, 0.0])
        assert tab(np.array([-5.0, 5.0])) == pytest.approx([0.0, 0.0])

    def test_interpolates_samples(self):
        xs, ys = _gaussian_table(n=401)
        tab = tabulated(xs, ys)
        mid = 0.5 * (xs[100] + xs[101])
        assert tab(mid) == pytest.approx(math.exp(-0.5 * mid * mid), abs=1e-7)

    def test_needs_increasing_grid(self):
        with pytest.raises(ParameterViolation):
            tabulated([0.0, 1.0, 1.0, 2.0], [0.0, 1.0, 1.0, 0.0])
