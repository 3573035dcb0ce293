import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qetlab.errors import NonConvergence, ParameterViolation, SingularKernel
from qetlab.quadrature import (
    QuadratureConfig,
    auto_cutoff,
    integrate_1d,
    integrate_2d,
    integrate_2d_iterated,
    integrate_frequency,
)

SQRT_PI_OVER_4 = 0.443113462726379  # int_0^inf e^{-w^2} w^2 dw, symbolic


def test_polynomial_exact():
    value, err = integrate_1d(lambda x: x**2, 0.0, 1.0)
    assert abs(value - 1.0 / 3.0) < 1e-12
    assert err < 1e-10


def test_gaussian_moment_with_cutoff():
    cfg = QuadratureConfig(freq_cutoff=10.0)
    value, err = integrate_1d(lambda w: np.exp(-(w**2)) * w**2, 0.0, 10.0, cfg)
    assert abs(value - SQRT_PI_OVER_4) < 1e-12


def test_declared_endpoint_singularity():
    value, err = integrate_1d(
        lambda x: x**-0.5, 0.0, 1.0, singular_endpoints=(True, False)
    )
    assert abs(value - 2.0) < 1e-9


def test_right_endpoint_singularity():
    value, _ = integrate_1d(
        lambda x: (1.0 - x) ** -0.5, 0.0, 1.0, singular_endpoints=(False, True)
    )
    assert abs(value - 2.0) < 1e-9


def test_nonconvergence_budget():
    cfg = QuadratureConfig(max_subdivisions=3, rel_tol=1e-14, abs_tol=1e-16)
    with pytest.raises(NonConvergence) as info:
        integrate_1d(lambda x: np.sin(50.0 * x) * x**-0.5 + np.cos(40 * x), 1e-9, 1.0, cfg)
    assert info.value.value is not None
    assert info.value.error is not None


def test_error_estimate_honest_on_smooth():
    value, err = integrate_1d(lambda x: np.sin(x), 0.0, 2.0)
    assert abs(value - (1.0 - math.cos(2.0))) <= max(err, 1e-13)


@settings(max_examples=20, deadline=None)
@given(
    a=st.floats(-2, 2), b=st.floats(-2, 2),
    c1=st.floats(0.2, 3), c2=st.floats(0.2, 3),
)
def test_linearity(a, b, c1, c2):
    cfg = QuadratureConfig()

    def f(x):
        return np.exp(-c1 * x * x)

    def g(x):
        return np.cos(c2 * x)

    lhs, _ = integrate_1d(lambda x: a * f(x) + b * g(x), -1.0, 2.0, cfg)
    fa, _ = integrate_1d(f, -1.0, 2.0, cfg)
    gb, _ = integrate_1d(g, -1.0, 2.0, cfg)
    scale = abs(lhs) + abs(a * fa) + abs(b * gb) + 1.0
    assert abs(lhs - (a * fa + b * gb)) <= 10.0 * cfg.rel_tol * scale


REGRESSION_CORPUS = [
    (lambda x: np.exp(-(x**2)), -4.0, 4.0),
    (lambda x: 1.0 / (1.0 + x * x), 0.0, 10.0),
    (lambda x: np.sin(7.0 * x) * np.exp(-x), 0.0, 6.0),
    (lambda x: x**4 - 3.0 * x + 1.0, -2.0, 3.0),
]


@pytest.mark.parametrize("f,a,b", REGRESSION_CORPUS)
def test_refinement_monotonicity(f, a, b):
    errs = []
    for rel in (1e-6, 5e-7, 2.5e-7, 1.25e-7):
        _, err = integrate_1d(f, a, b, QuadratureConfig(rel_tol=rel, abs_tol=1e-16))
        errs.append(err)
    assert all(e2 <= e1 * (1 + 1e-12) for e1, e2 in zip(errs, errs[1:]))


def test_2d_unit_square():
    value, _ = integrate_2d(
        lambda xa, xb: np.ones((len(xa), len(xb))), (0.0, 1.0), (0.0, 1.0)
    )
    assert abs(value - 1.0) < 1e-12


def test_2d_closed_form_kernel():
    # iint_0^1 (x + y + 1)^-3 = 1/6 by symbolic integration.
    def k(xa, xb):
        return 1.0 / (xa[:, None] + xb[None, :] + 1.0) ** 3

    value, _ = integrate_2d(k, (0.0, 1.0), (0.0, 1.0))
    assert abs(value - 1.0 / 6.0) < 1e-11


def test_2d_far_separated_gaussians():
    # Product of unit gaussians against 1/(xb - xa)^3 at separation s = 50:
    # asymptotically (area_A area_B) / s^3 = 2 pi / s^3, good to ~6 s^-2 ~ 0.5%.
    s = 50.0

    def k(xa, xb):
        g = np.exp(-0.5 * xa * xa)[:, None] * np.exp(-0.5 * (xb - s) ** 2)[None, :]
        d = xb[None, :] - xa[:, None]
        return g / d**3

    value, _ = integrate_2d(k, (-8.0, 8.0), (s - 8.0, s + 8.0))
    assert value == pytest.approx(2.0 * math.pi / s**3, rel=0.01)


def test_2d_matches_iterated():
    def k(xa, xb):
        return np.exp(-(xa[:, None] ** 2) - 0.5 * xb[None, :] ** 2) / (
            1.0 + (xa[:, None] - xb[None, :]) ** 2
        )

    cfg = QuadratureConfig(rel_tol=1e-11)
    v1, e1 = integrate_2d(k, (-3.0, 3.0), (-2.0, 4.0), cfg)
    v2, e2 = integrate_2d_iterated(k, (-3.0, 3.0), (-2.0, 4.0), cfg)
    assert abs(v1 - v2) <= 10.0 * (e1 + e2 + cfg.rel_tol * abs(v1))


def test_singular_kernel_detected():
    def k(xa, xb):
        return 1.0 / (xb[None, :] - xa[:, None]) ** 3

    def den(xa, xb):
        return xb[None, :] - xa[:, None]

    with pytest.raises(SingularKernel):
        integrate_2d(k, (0.0, 2.0), (1.0, 3.0), denominator=den)


def test_near_singular_corner_converges():
    # Denominator minimum 0.05 at the corner: integrable but sharply peaked.
    shift = 0.05

    def k(xa, xb):
        return 1.0 / (xb[None, :] - xa[:, None] + shift) ** 3

    def den(xa, xb):
        return xb[None, :] - xa[:, None] + shift

    cfg = QuadratureConfig(rel_tol=1e-9, max_subdivisions=20000)
    value, err = integrate_2d(k, (-1.0, 0.0), (0.0, 1.0), cfg, denominator=den)
    # Exact by iterated antiderivative: f(s) = 1/(2 s) summed over corners.
    def anti(s):
        return 1.0 / (2.0 * s)

    exact = anti(shift) - anti(1 + shift) - anti(1 + shift) + anti(2 + shift)
    assert value == pytest.approx(exact, rel=1e-7)


def test_frequency_integral_auto_cutoff():
    def f(w):
        return np.exp(-(w**2)) * w**2

    value, err, cutoff = integrate_frequency(f, QuadratureConfig())
    assert abs(value - SQRT_PI_OVER_4) < 1e-12
    assert cutoff >= 6.0


def test_auto_cutoff_respects_fixed():
    cfg = QuadratureConfig(freq_cutoff=12.5)
    assert auto_cutoff(lambda w: np.exp(-w), cfg) == 12.5


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rel_tol": 0.0},
        {"abs_tol": -1.0},
        {"epsilon_regulator": 0.0},
        {"grid_points": 8},
        {"max_subdivisions": 0},
        {"freq_cutoff": -1.0},
    ],
)
def test_config_invariants(kwargs):
    with pytest.raises(ParameterViolation):
        QuadratureConfig(**kwargs)
