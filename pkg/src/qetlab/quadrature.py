"""Adaptive quadrature services shared by the physics modules.

One engine, three entry points:

* :func:`integrate_1d` - adaptive bisection on 15-node Gauss-Legendre
  panels, error per panel estimated from the two-half refinement.
* :func:`integrate_2d` - tensor-product panels over a rectangle with
  worst-first refinement; optionally guards against a vanishing kernel
  denominator and prioritises refinement near kernel corners.
* :func:`integrate_frequency` - semi-infinite integrals with a
  super-polynomially decaying integrand, truncated where the integrand
  falls below the absolute tolerance.

Integrands must be vectorized: they receive numpy arrays of abscissas
(1d case) or a pair of node vectors (2d case, returning the tensor matrix
``K[i, j] = k(xa[i], xb[j])``).

All operations are pure functions of their inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, ParameterViolation, SingularKernel

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for the integration engine.

    Attributes
    ----------
    rel_tol, abs_tol : float
        Combined stopping criterion: total error estimate below
        ``max(abs_tol, rel_tol * |I|)``.
    max_subdivisions : int
        Panel-split budget per integral.
    freq_cutoff : float or None
        Upper limit for frequency integrals; ``None`` selects it
        automatically by doubling until the integrand drops below
        ``abs_tol``.
    epsilon_regulator : float
        Damping length used by mode-sum style point-split checks.
    grid_points : int
        Node count for discretized functionals built on top of this
        configuration.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 4000
    freq_cutoff: float | None = None
    epsilon_regulator: float = 0.05
    grid_points: int = 1024

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ParameterViolation("rel_tol and abs_tol must be positive")
        if self.epsilon_regulator <= 0:
            raise ParameterViolation("epsilon_regulator must be positive")
        if self.freq_cutoff is not None and self.freq_cutoff <= 0:
            raise ParameterViolation("freq_cutoff must be positive")
        if self.grid_points < 16:
            raise ParameterViolation("grid_points must be at least 16")
        if self.max_subdivisions < 1:
            raise ParameterViolation("max_subdivisions must be at least 1")


def _panel_1d(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    return half * float(np.dot(_WEIGHTS, f(x)))


def _tol(cfg, total):
    return max(cfg.abs_tol, cfg.rel_tol * abs(total))


def _adaptive_1d(f, a, b, cfg):
    whole = _panel_1d(f, a, b)
    counter = 0
    heap = []

    def make_entry(lo, hi, coarse):
        nonlocal counter
        mid = 0.5 * (lo + hi)
        il = _panel_1d(f, lo, mid)
        ir = _panel_1d(f, mid, hi)
        value = il + ir
        err = abs(coarse - value)
        counter += 1
        return (-err, counter, err, lo, hi, value, il, ir)

    heap.append(make_entry(a, b, whole))
    splits = 0
    while True:
        total = sum(e[5] for e in heap)
        error = sum(e[2] for e in heap)
        if error <= _tol(cfg, total):
            return total, error
        if splits >= cfg.max_subdivisions:
            raise NonConvergence(
                f"1d integration used {splits} subdivisions without reaching "
                f"tolerance (error estimate {error:.3e})",
                value=total,
                error=error,
            )
        _, _, err, lo, hi, value, il, ir = heapq.heappop(heap)
        if (hi - lo) <= 1e-15 * (abs(b - a) + abs(a) + abs(b)):
            # Narrower than representable refinement: keep the panel and its
            # error but drop it from the refinement queue.
            counter += 1
            heapq.heappush(heap, (0.0, counter, err, lo, hi, value, il, ir))
            splits += 1
            continue
        mid = 0.5 * (lo + hi)
        heapq.heappush(heap, make_entry(lo, mid, il))
        heapq.heappush(heap, make_entry(mid, hi, ir))
        splits += 1


def integrate_1d(f, a, b, cfg=None, singular_endpoints=(False, False)):
    """Integrate ``f`` over [a, b].

    Parameters
    ----------
    f : callable
        Vectorized integrand, ``f(x: ndarray) -> ndarray``.
    a, b : float
        Integration limits, ``a < b``.
    cfg : QuadratureConfig, optional
    singular_endpoints : (bool, bool)
        Declare an integrable algebraic singularity at the left/right
        endpoint.  A square-root substitution is applied there, which
        turns x^(-1/2)-type behaviour into a bounded integrand.

    Returns
    -------
    (value, error_estimate) : tuple of float

    Raises
    ------
    NonConvergence
        If the subdivision budget is exhausted first.
    """
    cfg = cfg or QuadratureConfig()
    if not b > a:
        raise ParameterViolation("integration interval must have b > a")
    left, right = singular_endpoints
    if left and right:
        mid = 0.5 * (a + b)
        v1, e1 = integrate_1d(f, a, mid, cfg, (True, False))
        v2, e2 = integrate_1d(f, mid, b, cfg, (False, True))
        return v1 + v2, e1 + e2
    if left:
        span = b - a

        def g(t):
            return f(a + span * t * t) * (2.0 * span * t)

        return _adaptive_1d(g, 0.0, 1.0, cfg)
    if right:
        span = b - a

        def g(t):
            return f(b - span * t * t) * (2.0 * span * t)

        return _adaptive_1d(g, 0.0, 1.0, cfg)
    return _adaptive_1d(f, a, b, cfg)


def _panel_2d(kernel, ax, bx, ay, by):
    hx = 0.5 * (bx - ax)
    hy = 0.5 * (by - ay)
    xs = 0.5 * (ax + bx) + hx * _NODES
    ys = 0.5 * (ay + by) + hy * _NODES
    k = kernel(xs, ys)
    return hx * hy * float(_WEIGHTS @ k @ _WEIGHTS), xs, ys


def integrate_2d(kernel, domain_a, domain_b, cfg=None, denominator=None):
    """Adaptive tensor-product integration over a rectangle.

    Parameters
    ----------
    kernel : callable
        ``kernel(xa, xb) -> ndarray`` of shape ``(len(xa), len(xb))``.
    domain_a, domain_b : (float, float)
        The two closed intervals of the product domain.
    denominator : callable, optional
        Same signature as ``kernel``.  When given, the engine raises
        :class:`SingularKernel` if the denominator vanishes (or changes
        sign) on the domain, and refinement is prioritised on panels
        whose denominator minimum falls below 10x the local cell width,
        which drives the subdivision toward near-singular corners.

    Returns
    -------
    (value, error_estimate) : tuple of float
    """
    cfg = cfg or QuadratureConfig()
    (ax, bx), (ay, by) = domain_a, domain_b
    if not (bx > ax and by > ay):
        raise ParameterViolation("2d domains must be non-degenerate intervals")

    def den_min(xs, ys):
        return float(np.min(denominator(xs, ys)))

    if denominator is not None:
        corners_x = np.array([ax, ax, bx, bx])
        corners_y = np.array([ay, by, ay, by])
        dmin = min(
            float(np.min(denominator(corners_x[i : i + 1], corners_y[i : i + 1])))
            for i in range(4)
        )
        probe, xs0, ys0 = _panel_2d(kernel, ax, bx, ay, by)
        dmin = min(dmin, den_min(xs0, ys0))
        if dmin <= 0.0:
            raise SingularKernel(
                f"kernel denominator reaches {dmin:.3e} on the integration domain"
            )

    counter = 0
    heap = []

    def make_entry(lo_x, hi_x, lo_y, hi_y, coarse):
        nonlocal counter
        wx, wy = hi_x - lo_x, hi_y - lo_y
        if wx >= wy:
            mx = 0.5 * (lo_x + hi_x)
            i1, xs1, ys1 = _panel_2d(kernel, lo_x, mx, lo_y, hi_y)
            i2, xs2, ys2 = _panel_2d(kernel, mx, hi_x, lo_y, hi_y)
            children = ((lo_x, mx, lo_y, hi_y, i1), (mx, hi_x, lo_y, hi_y, i2))
        else:
            my = 0.5 * (lo_y + hi_y)
            i1, xs1, ys1 = _panel_2d(kernel, lo_x, hi_x, lo_y, my)
            i2, xs2, ys2 = _panel_2d(kernel, lo_x, hi_x, my, hi_y)
            children = ((lo_x, hi_x, lo_y, my, i1), (lo_x, hi_x, my, hi_y, i2))
        value = children[0][4] + children[1][4]
        err = abs(coarse - value)
        priority = err
        if denominator is not None:
            local = min(den_min(xs1, ys1), den_min(xs2, ys2))
            if local < 10.0 * max(wx, wy):
                priority = err * 8.0
        counter += 1
        return (-priority, counter, err, value, children)

    whole, _, _ = _panel_2d(kernel, ax, bx, ay, by)
    heap.append(make_entry(ax, bx, ay, by, whole))
    splits = 0
    while True:
        total = sum(e[3] for e in heap)
        error = sum(e[2] for e in heap)
        if error <= _tol(cfg, total):
            return total, error
        if splits >= cfg.max_subdivisions:
            raise NonConvergence(
                f"2d integration used {splits} subdivisions without reaching "
                f"tolerance (error estimate {error:.3e})",
                value=total,
                error=error,
            )
        _, _, _, _, children = heapq.heappop(heap)
        for lo_x, hi_x, lo_y, hi_y, coarse in children:
            heapq.heappush(heap, make_entry(lo_x, hi_x, lo_y, hi_y, coarse))
        splits += 1


def integrate_2d_iterated(kernel, domain_a, domain_b, cfg=None):
    """Nested 1d evaluation of a 2d integral (outer over A, inner over B).

    Shares no panel machinery with :func:`integrate_2d` beyond the base
    rule, and is used as the independent numeric path for closed-form
    double integrals.
    """
    cfg = cfg or QuadratureConfig()
    inner_cfg = QuadratureConfig(
        rel_tol=cfg.rel_tol * 0.1,
        abs_tol=cfg.abs_tol * 0.1,
        max_subdivisions=cfg.max_subdivisions,
        freq_cutoff=cfg.freq_cutoff,
        epsilon_regulator=cfg.epsilon_regulator,
        grid_points=cfg.grid_points,
    )
    (ay, by) = domain_b

    def outer(xa):
        vals = np.empty_like(xa)
        for i, x in enumerate(xa):
            def inner(xb, x=x):
                return kernel(np.array([x]), xb)[0]

            vals[i], _ = integrate_1d(inner, ay, by, inner_cfg)
        return vals

    return integrate_1d(outer, domain_a[0], domain_a[1], cfg)


def auto_cutoff(f, cfg, start=1.0):
    """Find a truncation point where ``|f|`` stays below ``abs_tol``.

    Doubles from ``start`` until the integrand magnitude at the candidate
    cutoff (and at 1.37x it, to avoid stopping in an oscillation node)
    falls below the absolute tolerance.
    """
    if cfg.freq_cutoff is not None:
        return cfg.freq_cutoff
    omega = float(start)
    for _ in range(64):
        probe = np.abs(f(np.array([omega, 1.37 * omega])))
        if float(np.max(probe)) < cfg.abs_tol:
            return omega
        omega *= 2.0
    raise NonConvergence("no frequency cutoff found below 2^64 * start")


def integrate_frequency(f, cfg=None, start=1.0):
    """Integrate ``f`` over [0, inf) by truncating at :func:`auto_cutoff`."""
    cfg = cfg or QuadratureConfig()
    omega_max = auto_cutoff(f, cfg, start=start)
    value, err = integrate_1d(f, 0.0, omega_max, cfg)
    return value, err, omega_max
