"""Distance scans and power-law tail fitting.

A scan holds the profile shapes fixed and varies only the separation.
Per grid point the geometry places Alice's region immediately left of
-L/2 and Bob's immediately right of +L/2, each sized to its profile's
effective support, so the far-field kernel separation is

    s = L + T + (wA + wB) / 2

with wA, wB the support widths (16 sigma for gaussians).  The tail
exponent is obtained by least squares on the log-log tail (largest decade
of the grid by default).  The regressor is ln s whenever s varies across
the tail: the power law lives in the kernel separation, and regressing on
ln L instead would bias the fitted exponent by O(margin/L).  Under the
tracking policy s is constant by construction, so the fit falls back to
ln L and the expected exponent is 0.

Scan points are independent; with QET_THREADS != 1 they are evaluated by
a process pool (width QET_THREADS, default all cores) and merged back in
grid order, so the output is deterministic either way.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterViolation
from .profiles import ProtocolGeometry, validate_assignment
from .quadrature import QuadratureConfig
from .squeeze import make_piecewise_quadratic, squeeze_cost
from .vacuum import (
    injected_energy,
    ab_moment,
    gradient_norm,
    smeared_variance,
)


@dataclass(frozen=True)
class ScanPolicy:
    """How the squeeze shift l tracks the separation during a scan.

    mode "vacuum": no squeezing (l = 0).
    mode "squeezed_fixed_l": constant ``l_fixed`` for every point.
    mode "squeezed_tracking": l = L + T - margin_c0, which keeps the
    effective kernel separation constant; requires margin_c0 > 0 so
    l < L + T strictly at every point.
    """

    mode: str = "vacuum"
    l_fixed: float | None = None
    margin_c0: float | None = None

    def __post_init__(self):
        if self.mode not in ("vacuum", "squeezed_fixed_l", "squeezed_tracking"):
            raise ParameterViolation(f"unknown scan mode {self.mode!r}")
        if self.mode == "squeezed_fixed_l":
            if self.l_fixed is None or self.l_fixed < 0:
                raise ParameterViolation("squeezed_fixed_l needs l_fixed >= 0")
        if self.mode == "squeezed_tracking":
            if self.margin_c0 is not None and self.margin_c0 <= 0:
                raise ParameterViolation("tracking margin_c0 must be positive")


@dataclass(frozen=True)
class ScanResult:
    """Grid, per-point observables, and the fitted tail exponent."""

    mode: str
    L: np.ndarray
    separation: np.ndarray
    shift_l: np.ndarray
    E_A: float
    E_B: np.ndarray
    E_C: np.ndarray
    bound_ratio: np.ndarray
    rolling_slope: np.ndarray
    slope: float
    slope_halfwidth: float
    slope_variable: str
    tail_mask: np.ndarray
    flags: dict = field(default_factory=dict)


def default_tracking_margin(gA, gB, T) -> float:
    """Default tracking margin: 20 x the larger profile scale, plus T."""
    def scale(p):
        return p.sigma if p.sigma is not None else (p.support[1] - p.support[0]) / 16.0

    return 20.0 * max(scale(gA), scale(gB)) + T


def geometry_for_separation(gA_shape, gB_shape, L, T=0.0):
    """Centered profiles and regions for a given region gap L.

    Returns (gA, gB, geometry) before normalization: regions sized to the
    effective supports, inner edges at -L/2 and +L/2.
    """
    wA = gA_shape.support[1] - gA_shape.support[0]
    wB = gB_shape.support[1] - gB_shape.support[0]
    gA = gA_shape.translated(-L / 2.0 - wA / 2.0 - gA_shape.center)
    gB = gB_shape.translated(L / 2.0 + wB / 2.0 - gB_shape.center)
    geo = ProtocolGeometry(-L / 2.0 - wA, -L / 2.0, L / 2.0, L / 2.0 + wB, T)
    return gA, gB, geo


def fit_power_law_tail(x_primary, x_fallback, y, tail_mask):
    """Least-squares slope of ln y on the tail.

    Regresses on ln(x_primary) when it spans more than a factor 2 across
    the tail, else on ln(x_fallback).  Returns
    (slope, halfwidth, variable_name): halfwidth is twice the standard
    error of the fitted slope (residual-based).
    """
    xp = np.asarray(x_primary, dtype=float)[tail_mask]
    xf = np.asarray(x_fallback, dtype=float)[tail_mask]
    yv = np.asarray(y, dtype=float)[tail_mask]
    if len(yv) < 3:
        raise ParameterViolation("tail fit needs at least 3 points")
    if np.any(yv <= 0):
        raise ParameterViolation("tail fit needs positive values")
    if xp.max() / xp.min() > 2.0:
        xs, name = np.log(xp), "separation"
    else:
        xs, name = np.log(xf), "distance"
    ys = np.log(yv)
    xc = xs - xs.mean()
    sxx = float(np.dot(xc, xc))
    slope = float(np.dot(xc, ys) / sxx)
    resid = ys - (ys.mean() + slope * xc)
    dof = max(1, len(ys) - 2)
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / sxx)
    return slope, 2.0 * stderr, name


def _rolling_slope(L, E):
    """Centered log-log difference quotient; nan at the edges."""
    lnL, lnE = np.log(L), np.log(np.maximum(E, 1e-300))
    out = np.full(len(L), np.nan)
    out[1:-1] = (lnE[2:] - lnE[:-2]) / (lnL[2:] - lnL[:-2])
    return out


def _profile_for_policy(policy, gA, gB, geo):
    if policy.mode == "vacuum":
        return None, 0.0
    if policy.mode == "squeezed_fixed_l":
        l = policy.l_fixed
    else:
        c0 = policy.margin_c0
        if c0 is None:
            c0 = default_tracking_margin(gA, gB, geo.T)
        l = geo.L + geo.T - c0
        if l <= 0:
            raise ParameterViolation(
                f"tracking margin {c0:g} exceeds L+T={geo.L + geo.T:g}; "
                "no valid shift at this grid point"
            )
    if l == 0.0:
        return None, 0.0
    d = geo.d
    if l >= 2.0 * d:
        raise ParameterViolation(f"shift l={l:g} must stay below L+T={2 * d:g}")
    xbar = max(d / 2.0, l / 2.0)
    lam = l / (2.0 * (d * d - xbar * xbar))
    return make_piecewise_quadratic(lam, xbar, d), l


def _scan_point(args):
    (gA, gB, geo_raw, policy, cfg) = args
    config = validate_assignment(gA, gB, geo_raw)
    geo = config.geometry
    profile, l = _profile_for_policy(policy, config.gA, config.gB, geo)
    m = ab_moment(config.gA, config.gB, geo, shift_l=l, cfg=cfg)
    e_c = 0.0 if profile is None else squeeze_cost(profile, cfg=cfg)
    return m, l, e_c, geo.L


def run_scan(gA_shape, gB_shape, L_grid, T=0.0, policy=None, cfg=None,
             tail_decades=1.0):
    """Evaluate the protocol on a log-spaced separation grid.

    Requires a grid spanning at least 2 decades with at least 20 points
    (the slope fit needs a credible tail).  Shape-only quantities (E_A,
    <A^2>, G) are computed once; each point contributes one kernel
    integral.  Returns a :class:`ScanResult`.
    """
    cfg = cfg or QuadratureConfig()
    policy = policy or ScanPolicy()
    L_grid = np.asarray(L_grid, dtype=float)
    if len(L_grid) < 20:
        raise ParameterViolation("scan grid needs at least 20 points")
    if L_grid.max() / L_grid.min() < 99.999:
        raise ParameterViolation("scan grid must span at least 2 decades")
    if np.any(np.diff(L_grid) <= 0):
        raise ParameterViolation("scan grid must be strictly increasing")

    base_gA, base_gB, _ = geometry_for_separation(gA_shape, gB_shape, L_grid[0], T)
    e_a = injected_energy(base_gA, cfg)
    variance = smeared_variance(base_gA, cfg)
    grad = gradient_norm(base_gB, cfg)
    damping = math.exp(-4.0 * variance)

    tasks = []
    for L in L_grid:
        gA, gB, geo = geometry_for_separation(gA_shape, gB_shape, L, T)
        tasks.append((gA, gB, geo, policy, cfg))

    rows = _map_points(tasks)

    wA = gA_shape.support[1] - gA_shape.support[0]
    wB = gB_shape.support[1] - gB_shape.support[0]
    moments = np.array([r[0] for r in rows])
    shifts = np.array([r[1] for r in rows])
    costs = np.array([r[2] for r in rows])
    e_b = 4.0 * moments**2 * damping / grad
    separation = L_grid + T + 0.5 * (wA + wB) - shifts
    bound_ratio = 12.0 * math.pi * L_grid * e_b

    tail_mask = L_grid >= L_grid.max() / (10.0**tail_decades)
    slope, halfwidth, variable = fit_power_law_tail(
        separation, L_grid, e_b, tail_mask
    )
    accounting = e_b <= e_a + costs + 1e-15
    flags = {}
    if not bool(np.all(accounting)):
        flags["energy_accounting_violations"] = [
            float(L) for L in L_grid[~accounting]
        ]
    return ScanResult(
        mode=policy.mode,
        L=L_grid,
        separation=separation,
        shift_l=shifts,
        E_A=e_a,
        E_B=e_b,
        E_C=costs,
        bound_ratio=bound_ratio,
        rolling_slope=_rolling_slope(L_grid, e_b),
        slope=slope,
        slope_halfwidth=halfwidth,
        slope_variable=variable,
        tail_mask=tail_mask,
        flags=flags,
    )


def _map_points(tasks):
    width = os.environ.get("QET_THREADS", "").strip()
    try:
        width = int(width) if width else (os.cpu_count() or 1)
    except ValueError:
        raise ParameterViolation(f"QET_THREADS must be an integer, got {width!r}")
    if width > 1 and len(tasks) > 8:
        try:
            with ProcessPoolExecutor(max_workers=min(width, len(tasks))) as pool:
                return list(pool.map(_scan_point, tasks, chunksize=2))
        except OSError:
            pass
    return [_scan_point(t) for t in tasks]
