"""Squeeze profiles: construction, mode functions, correlators, energy cost.

A squeeze profile is a non-decreasing C1 map f with the asymptotic forms
f(x) = x + l/2 for x <= -d and f(x) = x - l/2 for x >= d, 0 <= l <= 2d.
The squeezed state built on the mode functions

    v_w(x) = exp(-i w f(x)) / sqrt(4 pi w)

has the two-point function

    <P(x) P(x')> = - f'(x) f'(x') / (4 pi (f(x) - f(x'))^2)

(point-split; the i-epsilon matters only at coincident image points).
Both asymptotic regions are exact local-vacuum regions, and across them
the kernel reduces to the vacuum one at effective distance x - x' - l.

The energy carried by the squeezed region has pointwise density

    rho(x) = -(1/24 pi) S{f}(x),    S{f} = f'''/f' - (3/2) (f''/f')^2,

plus point masses -(1/24 pi) [f''(k+) - f''(k-)] / f'(k) at every C1 knot
where f'' jumps.  Pointwise integral plus knot masses equals the total
cost

    E_C = (1/48 pi) int (d/dx ln f'(x))^2 dx,

an identity that holds distributionally (integration by parts; the knot
deltas cancel the segment boundary terms).  For C2 profiles the knot
masses vanish and the pointwise density alone integrates to E_C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import (
    CoincidentPoints,
    DivergentCost,
    KnotEvaluation,
    ParameterViolation,
)
from .quadrature import QuadratureConfig, integrate_1d

_C1_TOL = 1e-12
_MIN_SLOPE = 1e-9


@dataclass(frozen=True)
class _Segment:
    """One piece of f on [lo, hi], evaluated in u = x - ref.

    kind "poly": f = a0 + a1 u + a2 u^2 + a3 u^3 (affine pieces have
    a2 = a3 = 0).  kind "scale_inv": inverse of a piecewise-linear
    cumulative expansion; params = (x0, a0, r) with a(x) = a0 + r (x-x0),
    so f' = 1/a, f'' = -r/a^3, f''' = 3 r^2 / a^5 at x = f(u).
    """

    lo: float
    hi: float
    ref: float
    kind: str
    params: tuple

    def eval(self, x, order):
        u = np.asarray(x, dtype=float) - self.ref
        if self.kind == "poly":
            a0, a1, a2, a3 = self.params
            if order == 0:
                return ((a3 * u + a2) * u + a1) * u + a0
            if order == 1:
                return (3.0 * a3 * u + 2.0 * a2) * u + a1
            if order == 2:
                return 6.0 * a3 * u + 2.0 * a2
            return np.full_like(u, 6.0 * a3)
        x0, a0, r = self.params
        if r == 0.0:
            xx = x0 + u / a0
        else:
            xx = x0 + (np.sqrt(np.maximum(a0 * a0 + 2.0 * r * u, 0.0)) - a0) / r
        a = a0 + r * (xx - x0)
        if order == 0:
            return xx
        if order == 1:
            return 1.0 / a
        if order == 2:
            return -r / a**3
        return 3.0 * r * r / a**5

    @property
    def is_affine(self):
        if self.kind == "poly":
            return self.params[2] == 0.0 and self.params[3] == 0.0
        return self.params[2] == 0.0

    def min_slope(self):
        if self.kind == "poly":
            _, a1, a2, a3 = self.params
            lo = 0.0 if not math.isfinite(self.lo) else self.lo - self.ref
            hi = 0.0 if not math.isfinite(self.hi) else self.hi - self.ref
            cand = [
                (3.0 * a3 * u + 2.0 * a2) * u + a1 for u in (lo, hi)
            ]
            if a3 != 0.0:
                ucrit = -a2 / (3.0 * a3)
                if min(lo, hi) < ucrit < max(lo, hi):
                    cand.append((3.0 * a3 * ucrit + 2.0 * a2) * ucrit + a1)
            return min(cand)
        x0, a0, r = self.params
        x_hi = float(self.eval(self.hi, 0))
        return 1.0 / max(a0, a0 + r * (x_hi - x0))


@dataclass(frozen=True)
class SqueezeProfile:
    """Validated squeeze profile.

    Attributes
    ----------
    kind : str
        "identity", "piecewise_quadratic", "tabulated", or "scale_factor".
    shift : float
        The asymptotic shift l (total coordinate compression).
    half_width : float
        d; the asymptotic forms hold outside [-d, d].
    knots : ndarray
        Sorted interior segment boundaries.
    smoothness : str
        "C1", or "C0" for scale-factor profiles with slope kinks.
    """

    kind: str
    shift: float
    half_width: float
    knots: np.ndarray
    segments: tuple
    smoothness: str = "C1"
    meta: dict = field(default_factory=dict)

    def _eval(self, x, order):
        scalar = np.isscalar(x)
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xv)
        idx = np.searchsorted(self.knots, xv, side="right")
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.segments[i].eval(xv[sel], order)
        return float(out[0]) if scalar else out

    def f(self, x):
        return self._eval(x, 0)

    def df(self, x):
        return self._eval(x, 1)

    def d2f(self, x):
        return self._eval(x, 2)

    def d3f(self, x):
        return self._eval(x, 3)

    @property
    def activity_interval(self):
        """Span outside of which f is exactly affine."""
        if len(self.knots) == 0:
            return (0.0, 0.0)
        return (float(self.knots[0]), float(self.knots[-1]))

    def to_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "shift_l": self.shift,
            "half_width_d": self.half_width,
            "smoothness": self.smoothness,
        }
        doc.update({k: v for k, v in self.meta.items() if k != "scale_table"})
        return doc


def _validate(profile: SqueezeProfile) -> SqueezeProfile:
    segs = profile.segments
    scale = max(1.0, profile.half_width, abs(profile.shift))
    kinks = []
    for k, left, right in zip(profile.knots, segs[:-1], segs[1:]):
        fl, fr = float(left.eval(k, 0)), float(right.eval(k, 0))
        dl, dr = float(left.eval(k, 1)), float(right.eval(k, 1))
        if abs(fl - fr) > _C1_TOL * scale:
            raise ParameterViolation(
                f"profile discontinuous at knot x={k:g} ({fl:.15g} vs {fr:.15g})"
            )
        if abs(dl - dr) > _C1_TOL:
            kinks.append(float(k))
    if kinks and profile.kind != "scale_factor":
        raise ParameterViolation(
            f"profile slope is discontinuous at knots {kinks} (C1 required)"
        )
    for seg in segs:
        if seg.min_slope() < -_C1_TOL:
            raise ParameterViolation(
                f"profile is decreasing on [{seg.lo:g}, {seg.hi:g}]"
            )
    if not -_C1_TOL <= profile.shift <= 2.0 * profile.half_width + _C1_TOL:
        raise ParameterViolation(
            f"shift l={profile.shift:g} outside [0, 2d] with d={profile.half_width:g}"
        )
    if kinks:
        object.__setattr__(profile, "smoothness", "C0")
        profile.meta["kinks"] = kinks
    return profile


def identity_profile() -> SqueezeProfile:
    """f(x) = x: zero shift, zero cost, plain vacuum statistics."""
    seg = _Segment(-math.inf, math.inf, 0.0, "poly", (0.0, 1.0, 0.0, 0.0))
    return SqueezeProfile("identity", 0.0, 0.0, np.array([]), (seg,))


def make_piecewise_quadratic(lam, xbar, d) -> SqueezeProfile:
    """Odd C1 profile: linear core, quadratic flanks, affine tails.

    Requires 0 < xbar < d and 0 < lam < 1/(2(d - xbar)); the shift is
    l = 2 lam (d^2 - xbar^2), approaching its upper limit 2d as
    lam -> 1/(2(d - xbar)) with xbar -> d.
    """
    if d <= 0:
        raise ParameterViolation("half-width d must be positive")
    if not 0.0 < xbar < d:
        raise ParameterViolation(f"xbar={xbar:g} violates 0 < xbar < d={d:g}")
    lam_max = 1.0 / (2.0 * (d - xbar))
    if not 0.0 < lam < lam_max:
        raise ParameterViolation(
            f"lambda={lam:g} violates 0 < lambda < [2(d-xbar)]^-1 = {lam_max:g}"
        )
    l = 2.0 * lam * (d * d - xbar * xbar)
    t0 = 1.0 - 2.0 * lam * (d - xbar)
    segments = (
        # x <= -d: f = x + l/2, in u = x + d.
        _Segment(-math.inf, -d, -d, "poly", (l / 2.0 - d, 1.0, 0.0, 0.0)),
        # -d <= x <= -xbar: f = x + l/2 - lam (x + d)^2.
        _Segment(-d, -xbar, -d, "poly", (l / 2.0 - d, 1.0, -lam, 0.0)),
        # |x| <= xbar: f = t0 x.
        _Segment(-xbar, xbar, -xbar, "poly", (-t0 * xbar, t0, 0.0, 0.0)),
        # xbar <= x <= d: f = x - l/2 + lam (x - d)^2.
        _Segment(
            xbar, d, xbar,
            "poly",
            (xbar - l / 2.0 + lam * (d - xbar) ** 2, t0, lam, 0.0),
        ),
        # x >= d: f = x - l/2.
        _Segment(d, math.inf, d, "poly", (d - l / 2.0, 1.0, 0.0, 0.0)),
    )
    prof = SqueezeProfile(
        "piecewise_quadratic",
        l,
        d,
        np.array([-d, -xbar, xbar, d], dtype=float),
        segments,
        meta={"lambda": lam, "xbar": xbar},
    )
    return _validate(prof)


def tabulated_profile(xs, fs, half_width=None) -> SqueezeProfile:
    """Monotone C1 interpolation of samples of f, affine outside the table.

    The table must be consistent with the asymptotic forms at both ends:
    the implied shifts 2 (f(x_0) - x_0) and 2 (x_N - f(x_N)) must agree.
    Interpolation slopes are clamped to >= 1e-9 so the squeeze cost stays
    finite; the end slopes are pinned to 1 to join the affine tails in C1.
    """
    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if xs.ndim != 1 or xs.shape != fs.shape or len(xs) < 3:
        raise ParameterViolation("tabulated profile needs >= 3 (x, f) samples")
    if np.any(np.diff(xs) <= 0):
        raise ParameterViolation("tabulated profile abscissas must increase")
    if np.any(np.diff(fs) < -_C1_TOL):
        raise ParameterViolation("tabulated profile must be non-decreasing")
    l_left = 2.0 * (fs[0] - xs[0])
    l_right = 2.0 * (xs[-1] - fs[-1])
    if abs(l_left - l_right) > 1e-9 * max(1.0, abs(l_left), abs(l_right)):
        raise ParameterViolation(
            f"table ends imply inconsistent shifts ({l_left:g} vs {l_right:g})"
        )
    l = 0.5 * (l_left + l_right)
    pchip = PchipInterpolator(xs, fs)
    slopes = np.maximum(pchip(xs, 1), _MIN_SLOPE)
    slopes[0] = 1.0
    slopes[-1] = 1.0
    spline = CubicHermiteSpline(xs, fs, slopes)
    d = half_width if half_width is not None else max(abs(xs[0]), abs(xs[-1]))
    segments = [_Segment(-math.inf, xs[0], xs[0], "poly", (fs[0], 1.0, 0.0, 0.0))]
    c = spline.c
    for i in range(len(xs) - 1):
        a3, a2, a1, a0 = c[0, i], c[1, i], c[2, i], c[3, i]
        segments.append(
            _Segment(xs[i], xs[i + 1], xs[i], "poly", (a0, a1, a2, a3))
        )
    segments.append(
        _Segment(xs[-1], math.inf, xs[-1], "poly", (fs[-1], 1.0, 0.0, 0.0))
    )
    prof = SqueezeProfile(
        "tabulated", l, float(d), xs.copy(), tuple(segments)
    )
    return _validate(prof)


def profile_from_scale_factor(a, domain=None, n_samples=2049) -> SqueezeProfile:
    """Profile induced by an instantaneous spatial expansion a(x) >= 0.

    ``a`` is either a callable (sampled on ``n_samples`` points of
    ``domain`` and treated piecewise-linear) or a table ``(xs, values)``;
    duplicate abscissas encode jumps of the scale factor, which produce a
    C0 profile (slope kinks) flagged via ``smoothness``.

    The construction inverts the physical-coordinate map
    X(x) = int_0^x a dx'; the resulting shift is l = int (a - 1) dx over
    the stretching region, and the map is recentred so the asymptotic
    shifts are symmetric (f = x + l/2 far left, x - l/2 far right).
    """
    if callable(a):
        if domain is None:
            raise ParameterViolation("domain required with a callable scale factor")
        xs = np.linspace(domain[0], domain[1], n_samples)
        vals = np.asarray(a(xs), dtype=float)
    else:
        xs = np.asarray(a[0], dtype=float)
        vals = np.asarray(a[1], dtype=float)
    if xs.ndim != 1 or xs.shape != vals.shape or len(xs) < 2:
        raise ParameterViolation("scale factor needs >= 2 (x, a) samples")
    if np.any(np.diff(xs) < 0):
        raise ParameterViolation("scale factor abscissas must be non-decreasing")
    if np.any(vals <= 0):
        raise ParameterViolation("scale factor must be positive everywhere")

    # Cumulative X over the pieces (zero-width pieces are jumps).
    widths = np.diff(xs)
    X = np.empty_like(xs)
    X[0] = xs[0]
    seg_data = []
    for i, w in enumerate(widths):
        if w == 0.0:
            X[i + 1] = X[i]
            continue
        r = (vals[i + 1] - vals[i]) / w
        seg_data.append((xs[i], X[i], vals[i], r))
        X[i + 1] = X[i] + vals[i] * w + 0.5 * r * w * w
    if not seg_data:
        raise ParameterViolation("scale factor table has no extent")
    l = float(X[-1] - X[0] - (xs[-1] - xs[0]))
    if l < -_C1_TOL:
        raise ParameterViolation(
            "net contraction (l < 0): scale factor must stretch on average"
        )

    # Recentre so the asymptotic shifts are symmetric: f(y) = X^-1(y + l/2).
    shift = l / 2.0
    ys = [X0 - shift for (_, X0, _, _) in seg_data] + [X[-1] - shift]
    segments = [
        _Segment(-math.inf, ys[0], ys[0], "poly", (xs[0], 1.0, 0.0, 0.0))
    ]
    for (x0, X0, a0, r), y_lo, y_hi in zip(seg_data, ys[:-1], ys[1:]):
        segments.append(_Segment(y_lo, y_hi, y_lo, "scale_inv", (x0, a0, r)))
    segments.append(
        _Segment(ys[-1], math.inf, ys[-1], "poly", (xs[-1], 1.0, 0.0, 0.0))
    )
    d = max(abs(ys[0]), abs(ys[-1]))
    prof = SqueezeProfile(
        "scale_factor",
        l,
        float(d),
        np.asarray(ys),
        tuple(segments),
        meta={"scale_table": (xs.copy(), vals.copy())},
    )
    return _validate(prof)


def mode_function(profile, omega, x):
    """v_w(x) = exp(-i w f(x)) / sqrt(4 pi w); |v_w| = 1/sqrt(4 pi w)."""
    if omega <= 0:
        raise ParameterViolation("mode frequency must be positive")
    return np.exp(-1j * omega * profile.f(x)) / math.sqrt(4.0 * math.pi * omega)


def vacuum_kernel(x, xp):
    """Vacuum point-split kernel -1 / (4 pi (x - x')^2)."""
    dx = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
    return -1.0 / (4.0 * math.pi * dx * dx)


def squeezed_correlator(profile, x, xp):
    """Point-split kernel -f'(x) f'(x') / (4 pi (f(x) - f(x'))^2)."""
    fx, fxp = profile.f(x), profile.f(xp)
    df = fx - fxp
    if np.any(np.asarray(df) == 0.0):
        raise CoincidentPoints(
            "correlator evaluated at coincident image points f(x) = f(x')"
        )
    return -profile.df(x) * profile.df(xp) / (4.0 * math.pi * df * df)


def mode_sum_correlator(profile, x, xp, omega_max, epsilon, n_modes=None):
    """Reconstruct the kernel as a damped mode sum up to ``omega_max``.

    Returns Re int_0^W (w/4pi) f'(x) f'(x') e^{-i w (f(x)-f(x'))} e^{-eps w} dw
    by composite Simpson; converges to the epsilon-regularized kernel with
    the truncation controlled by |tail| <= e^{-eps W} W / (2 pi eps)
    (for unit asymptotic slopes).
    """
    if epsilon <= 0:
        raise ParameterViolation("mode-sum regulator epsilon must be positive")
    df = abs(profile.f(x) - profile.f(xp))
    if n_modes is None:
        n_modes = int(max(4097, math.ceil(8.0 * omega_max * max(1.0, df))))
    if n_modes % 2 == 0:
        n_modes += 1
    w = np.linspace(0.0, omega_max, n_modes)
    h = w[1] - w[0]
    integrand = (
        (w / (4.0 * math.pi))
        * profile.df(x)
        * profile.df(xp)
        * np.exp(-epsilon * w)
        * np.cos(w * (profile.f(x) - profile.f(xp)))
    )
    weights = np.ones(n_modes)
    weights[1:-1:2] = 4.0
    weights[2:-2:2] = 2.0
    return float(h / 3.0 * np.dot(weights, integrand))


def mode_sum_tail_bound(omega_max, epsilon):
    """Analytic bound on the mode-sum truncation error."""
    return math.exp(-epsilon * omega_max) * omega_max / (2.0 * math.pi * epsilon)


def _schwarzian_density(seg, x):
    fp = seg.eval(x, 1)
    fpp = seg.eval(x, 2)
    fppp = seg.eval(x, 3)
    s = fppp / fp - 1.5 * (fpp / fp) ** 2
    return -s / (24.0 * math.pi)


def energy_density(profile, x, side=None):
    """Pointwise energy density -(1/24 pi) S{f}(x).

    Undefined exactly at knots (f'' jumps there): pass ``side`` ("left" or
    "right") for a one-sided value, otherwise KnotEvaluation is raised.
    Identically zero wherever f is affine, in particular outside [-d, d].
    """
    scalar = np.isscalar(x)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    scale = max(1.0, profile.half_width)
    at_knot = np.zeros(len(xv), dtype=bool)
    if len(profile.knots):
        dist = np.min(np.abs(xv[:, None] - profile.knots[None, :]), axis=1)
        at_knot = dist <= _C1_TOL * scale
    if np.any(at_knot) and side is None:
        raise KnotEvaluation(
            "energy density evaluated at a knot; pass side='left' or 'right'"
        )
    idx = np.searchsorted(profile.knots, xv, side="right")
    if side == "left":
        hit = np.isin(xv, profile.knots) | at_knot
        idx = np.where(hit, np.maximum(idx - 1, 0), idx)
    out = np.empty_like(xv)
    for i in np.unique(idx):
        sel = idx == i
        out[sel] = _schwarzian_density(profile.segments[i], xv[sel])
    return float(out[0]) if scalar else out


def knot_energies(profile):
    """Point masses of the energy density at C1 knots.

    Returns a list of (x_knot, mass) with mass
    -(1/24 pi) [f''(k+) - f''(k-)] / f'(k).  Raises DivergentCost at a
    slope discontinuity (the density would carry a squared delta there).
    """
    out = []
    segs = profile.segments
    for k, left, right in zip(profile.knots, segs[:-1], segs[1:]):
        dl, dr = float(left.eval(k, 1)), float(right.eval(k, 1))
        if abs(dl - dr) > _C1_TOL:
            raise DivergentCost(
                f"slope discontinuity at x={k:g}: point energy diverges"
            )
        jump = float(right.eval(k, 2)) - float(left.eval(k, 2))
        if jump != 0.0:
            out.append((float(k), -jump / (24.0 * math.pi * dl)))
    return out


def _segment_cost(segments, window=None, cfg=None):
    """(1/48 pi) int (f''/f')^2 over the non-affine parts of ``segments``."""
    cfg = cfg or QuadratureConfig()
    total = 0.0
    for seg in segments:
        if seg.is_affine:
            continue
        lo, hi = seg.lo, seg.hi
        if window is not None:
            lo, hi = max(lo, window[0]), min(hi, window[1])
            if hi <= lo:
                continue
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ParameterViolation("non-affine segment with infinite extent")
        ms = seg.min_slope()
        if ms < _MIN_SLOPE * 1e-3:
            raise DivergentCost(
                f"profile slope reaches {ms:.3e} on [{lo:g}, {hi:g}]; "
                "squeeze cost diverges"
            )

        def integrand(x, seg=seg):
            return (seg.eval(x, 2) / seg.eval(x, 1)) ** 2

        val, _ = integrate_1d(integrand, lo, hi, cfg)
        total += val
    return total / (48.0 * math.pi)


def squeeze_cost(profile, window=None, cfg=None):
    """Total preparation energy E_C = (1/48 pi) int (d ln f'/dx)^2 dx.

    Integrates over the full region where f is not affine; pass
    ``window`` to restrict to a geometry window instead.  Zero iff the
    profile is affine on the region; diverges (DivergentCost) when the
    slope vanishes or jumps.
    """
    for k, left, right in zip(profile.knots, profile.segments[:-1], profile.segments[1:]):
        dl, dr = float(left.eval(k, 1)), float(right.eval(k, 1))
        if abs(dl - dr) > _C1_TOL:
            raise DivergentCost(
                f"slope discontinuity at x={k:g}: squeeze cost diverges"
            )
    return _segment_cost(profile.segments, window=window, cfg=cfg)


def piecewise_quadratic_cost(lam, xbar, d):
    """Closed-form squeeze cost of the piecewise-quadratic family:
    lam (1/(1 - 2 lam (d - xbar)) - 1) / (12 pi)."""
    t0 = 1.0 - 2.0 * lam * (d - xbar)
    return lam * (1.0 / t0 - 1.0) / (12.0 * math.pi)


def density_integral(profile, window=None, cfg=None) -> dict:
    """Quadrature of the pointwise density plus the knot masses.

    Returns {"pointwise": ..., "knot_masses": [(x, m), ...], "total": ...};
    ``total`` reproduces :func:`squeeze_cost` (for C2 profiles the masses
    vanish and the pointwise part alone does).
    """
    cfg = cfg or QuadratureConfig()
    pointwise = 0.0
    for seg in profile.segments:
        if seg.is_affine:
            continue
        lo, hi = seg.lo, seg.hi
        if window is not None:
            lo, hi = max(lo, window[0]), min(hi, window[1])
            if hi <= lo:
                continue
        val, _ = integrate_1d(lambda x, seg=seg: _schwarzian_density(seg, x), lo, hi, cfg)
        pointwise += val
    masses = knot_energies(profile)
    if window is not None:
        masses = [(x, m) for x, m in masses if window[0] <= x <= window[1]]
    return {
        "pointwise": pointwise,
        "knot_masses": masses,
        "total": pointwise + sum(m for _, m in masses),
    }


def density_curve(profile, n=513, window=None):
    """Sample (x, density) on segment-interior points for export.

    Knots are avoided by sampling strictly inside each segment, so the
    curve is the pointwise density; knot masses are reported separately
    by :func:`knot_energies`.
    """
    lo, hi = window if window is not None else profile.activity_interval
    if hi <= lo:
        lo, hi = -1.0, 1.0
    xs, ds = [], []
    bounds = [lo] + [k for k in profile.knots if lo < k < hi] + [hi]
    per_seg = max(8, n // max(1, len(bounds) - 1))
    for a, b in zip(bounds[:-1], bounds[1:]):
        inner = np.linspace(a, b, per_seg + 2)[1:-1]
        xs.append(inner)
        ds.append(energy_density(profile, inner))
    return np.concatenate(xs), np.concatenate(ds)
