"""Independent validation oracle: mode-sum moments on fixed-node rules.

Reconstructs the protocol moments from the mode expansion instead of the
closed-form kernels, sharing no quadrature code with the main modules:
smearing integrals use fixed Simpson grids, the frequency integral uses
uniform-Simpson or log-trapezoid nodes, and the point-split regulator is
an explicit e^{-eps w} damping with a three-point Richardson limit
eps -> 0 (evaluated at eps, 2 eps, 4 eps, which respects the grid
invariant Omega * eps >= 5 at the smallest damping).

With F = f the squeeze map (identity for the vacuum state),

    hA(w) = int gA(x) F'(x) e^{-i w F(x)} dx
    tB(w) = int gB(y - T) [F''(y) + i w F'(y)^2] e^{+i w F(y)} dy

    <A^2>  = int_0^W (w/4 pi) |hA|^2 e^{-eps w} dw
    <AB'>  = Re int_0^W (w/4 pi) hA tB e^{-eps w} dw

Mode contributions are summed in a fixed index order, so results are
bit-reproducible for a given backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DegenerateProfile, ParameterViolation
from .profiles import validate_assignment
from .squeeze import identity_profile

_MIN_EPS_OMEGA = 5.0


@dataclass(frozen=True)
class ModeGrid:
    """Frequency discretization of the mode expansion.

    The invariant omega_max * epsilon >= 5 keeps the worst-case sharp
    truncation below e^-5; the defaults give e^-15 < 1e-6.
    """

    omega_max: float = 300.0
    n_modes: int = 30001
    epsilon: float = 0.05
    spacing: str = "uniform"

    def __post_init__(self):
        if self.omega_max <= 0 or self.epsilon <= 0:
            raise ParameterViolation("omega_max and epsilon must be positive")
        if self.omega_max * self.epsilon < _MIN_EPS_OMEGA:
            raise ParameterViolation(
                f"mode grid needs omega_max * epsilon >= {_MIN_EPS_OMEGA:g} "
                f"(got {self.omega_max * self.epsilon:g})"
            )
        if self.n_modes < 129:
            raise ParameterViolation("mode grid needs at least 129 nodes")
        if self.spacing not in ("uniform", "log"):
            raise ParameterViolation("spacing must be 'uniform' or 'log'")

    def nodes_weights(self):
        if self.spacing == "uniform":
            n = self.n_modes if self.n_modes % 2 else self.n_modes + 1
            w = np.linspace(0.0, self.omega_max, n)
            h = w[1] - w[0]
            wt = np.ones(n)
            wt[1:-1:2] = 4.0
            wt[2:-2:2] = 2.0
            return w, wt * (h / 3.0)
        w = np.geomspace(self.omega_max * 1e-7, self.omega_max, self.n_modes)
        wt = np.zeros_like(w)
        wt[1:-1] = 0.5 * (w[2:] - w[:-2])
        wt[0] = 0.5 * (w[1] - w[0]) + w[0]  # include the [0, w_min] sliver
        wt[-1] = 0.5 * (w[-1] - w[-2])
        return w, wt

    def tail_bound(self):
        """Worst-case sharp-truncation bound e^{-eps W} W / (2 pi eps)."""
        return (
            math.exp(-self.epsilon * self.omega_max)
            * self.omega_max
            / (2.0 * math.pi * self.epsilon)
        )


def suggest_mode_grid(gA, gB, geometry, profile=None, epsilon=0.05,
                      spacing="uniform") -> ModeGrid:
    """Grid sized to resolve the cross-moment phase at this separation."""
    shift = profile.shift if profile is not None else 0.0
    span_a = gA.support[1] - gA.support[0]
    span_b = gB.support[1] - gB.support[0]
    omega_max = _MIN_EPS_OMEGA / epsilon
    s_max = (
        (gB.support[1] + geometry.T) - gA.support[0] - shift
    )
    n = int(math.ceil(omega_max * max(s_max, span_a, span_b, 1.0) / 0.5))
    n = max(4097, n)
    if n % 2 == 0:
        n += 1
    return ModeGrid(omega_max, n, epsilon, spacing)


def _simpson_grid(lo, hi, n):
    if n % 2 == 0:
        n += 1
    xs = np.linspace(lo, hi, n)
    h = xs[1] - xs[0]
    wt = np.ones(n)
    wt[1:-1:2] = 4.0
    wt[2:-2:2] = 2.0
    return xs, wt * (h / 3.0)


def _x_nodes(profile_support, omega_max):
    lo, hi = profile_support
    n = int(math.ceil((hi - lo) * omega_max / 0.5))
    return _simpson_grid(lo, hi, max(4097, n))


def _richardson3(values):
    """Limit eps -> 0 from samples at (eps, 2 eps, 4 eps)."""
    i1, i2, i4 = values
    return (8.0 * i1 - 6.0 * i2 + i4) / 3.0


def oracle_moments(gA, gB, geometry, profile=None, grid=None, return_details=False):
    """Mode-sum estimates of (<A^2>, <AB'(T)>).

    ``profile`` is the squeeze map (None for the vacuum state).  The
    moments are extrapolated to zero damping; the attached error estimate
    combines the Richardson defect and the sharp-truncation bound.
    """
    config = validate_assignment(gA, gB, geometry)
    gA, gB, geo = config.gA, config.gB, config.geometry
    prof = profile if profile is not None else identity_profile()
    if grid is None:
        grid = suggest_mode_grid(gA, gB, geo, prof)

    omega, omega_wt = grid.nodes_weights()
    eps = grid.epsilon

    xa, wa = _x_nodes(gA.support, grid.omega_max)
    ya, phases_a = np.asarray(gA(xa)), prof.f(xa)
    h_a = backend.phase_sum(omega, wa * ya * prof.df(xa), phases_a, -1)

    # Bob's observable lives on the time-T image of his support.
    yb_lo, yb_hi = gB.support[0] + geo.T, gB.support[1] + geo.T
    xb, wb = _x_nodes((yb_lo, yb_hi), grid.omega_max)
    gb_vals = np.asarray(gB(xb - geo.T))
    fb = prof.f(xb)
    t_curv = backend.phase_sum(omega, wb * gb_vals * prof.d2f(xb), fb, +1)
    t_slope = backend.phase_sum(omega, wb * gb_vals * prof.df(xb) ** 2, fb, +1)
    t_b = t_curv + 1j * omega * t_slope

    base = omega / (4.0 * math.pi) * omega_wt
    a2_samples = []
    m_samples = []
    for k in (1.0, 2.0, 4.0):
        damp = np.exp(-k * eps * omega)
        a2_samples.append(float(np.dot(base * damp, np.abs(h_a) ** 2)))
        m_samples.append(float(np.real(np.dot(base * damp, h_a * t_b))))
    a2 = _richardson3(a2_samples)
    m = _richardson3(m_samples)
    details = {
        "A_variance_samples": a2_samples,
        "AB_moment_samples": m_samples,
        "A_variance_error": abs(a2 - a2_samples[0]) + grid.tail_bound(),
        "AB_moment_error": abs(m - m_samples[0]) + grid.tail_bound(),
        "grid": grid,
    }
    if return_details:
        return (a2, m), details
    return a2, m


def oracle_energy(moments, grad_norm) -> float:
    """Moment-route energy 4 <AB'>^2 e^{-4 <A^2>} / G."""
    if grad_norm <= 0:
        raise DegenerateProfile("gradient norm must be positive")
    a2, m = moments
    return 4.0 * m * m * math.exp(-4.0 * a2) / grad_norm


def oracle_gradient_norm(gB, n=16385) -> float:
    """int (gB')^2 dx by central differences and a fixed Simpson rule.

    Uses only profile *values*: independent of both the analytic
    derivative formulas and the adaptive engine.
    """
    lo, hi = gB.support
    pad = (hi - lo) * 1e-3
    xs, wt = _simpson_grid(lo - pad, hi + pad, n)
    h = xs[1] - xs[0]
    vals = np.asarray(gB(xs))
    deriv = np.zeros_like(vals)
    deriv[1:-1] = (vals[2:] - vals[:-2]) / (2.0 * h)
    return float(np.dot(wt, deriv**2))


def compare_protocol(gA, gB, geometry, profile=None, grid=None, cfg=None,
                     tolerance=0.01, corrupt_damping=0.0) -> dict:
    """Oracle-vs-main comparison report.

    Evaluates <A^2>, <AB'>, and E_B (or E_Bf) on both paths and flags each
    at the given relative tolerance.  ``corrupt_damping`` is a
    fault-injection hook (used by tests and the CLI test mode): it scales
    the main route's damping exponent so a genuine discrepancy appears.
    """
    from .quadrature import QuadratureConfig
    from .vacuum import ab_moment, smeared_variance
    from .profiles import gradient_norm

    cfg = cfg or QuadratureConfig()
    config = validate_assignment(gA, gB, geometry)
    shift = profile.shift if profile is not None else 0.0

    main_a2 = smeared_variance(config.gA, cfg)
    main_m = ab_moment(config.gA, config.gB, config.geometry, shift_l=shift, cfg=cfg)
    main_grad = gradient_norm(config.gB, cfg)
    damp_exponent = -4.0 * main_a2 * (1.0 + corrupt_damping)
    main_eb = 4.0 * main_m**2 * math.exp(damp_exponent) / main_grad

    (ora_a2, ora_m), details = oracle_moments(
        gA, gB, geometry, profile=profile, grid=grid, return_details=True
    )
    ora_grad = oracle_gradient_norm(config.gB)
    ora_eb = oracle_energy((ora_a2, ora_m), ora_grad)

    def entry(name, oracle_val, main_val):
        denom = max(abs(oracle_val), abs(main_val), 1e-300)
        rel = abs(oracle_val - main_val) / denom
        return {
            "quantity": name,
            "oracle": oracle_val,
            "main": main_val,
            "rel_diff": rel,
            "pass": bool(rel <= tolerance),
        }

    name_eb = "E_Bf" if shift else "E_B"
    rows = [
        entry("A_variance", ora_a2, main_a2),
        entry("AB_moment", ora_m, main_m),
        entry(name_eb, ora_eb, main_eb),
    ]
    return {
        "tolerance": tolerance,
        "comparisons": rows,
        "all_pass": bool(all(r["pass"] for r in rows)),
        "oracle_errors": {
            "A_variance": details["A_variance_error"],
            "AB_moment": details["AB_moment_error"],
        },
    }
