"""Squeezed-state protocol: teleported energy without the distance bound.

With Alice and Bob sitting in the profile's local-vacuum regions, the
only change relative to the vacuum protocol is the kernel denominator
(xb - xa + T - l)^3: the squeezed state's cross-region correlator is the
vacuum one at effective distance reduced by the shift l.  Everything else
(measured variance, probabilities, feedback optimization) is untouched,
because Alice's region is an exact local-vacuum region.

The preparation cost E_C of the squeezed region is reported alongside,
never subtracted: it is state-preparation energy, distinct from the
measurement energy E_A, and users do their own accounting.
"""

from __future__ import annotations

import math
from dataclasses import replace

from .errors import ParameterViolation
from .profiles import validate_assignment
from .quadrature import QuadratureConfig
from .squeeze import SqueezeProfile, squeeze_cost
from .vacuum import ROUTE_TOLERANCE, TeleportReport, _teleport_core, moment_route_energy

_TOL = 1e-9


def _check_profile_geometry(profile: SqueezeProfile, geo):
    scale = max(1.0, geo.d)
    if profile.shift > 2.0 * geo.d + _TOL * scale:
        raise ParameterViolation(
            f"profile shift l={profile.shift:g} exceeds L+T={2 * geo.d:g}"
        )
    if profile.half_width > geo.d + _TOL * scale:
        raise ParameterViolation(
            f"profile half-width d={profile.half_width:g} exceeds the "
            f"geometry half-width {geo.d:g}: the smearing regions would "
            "overlap the squeezed region"
        )


def teleported_energy_squeezed(
    gA, gB, geometry, profile: SqueezeProfile, cfg=None,
    route_tol=ROUTE_TOLERANCE,
) -> TeleportReport:
    """Squeezed-protocol evaluation with the two-route cross-check.

    Requires the smearing supports inside the profile's local-vacuum
    regions (after centering: gA left of -d, gB's time-T image right of
    +d) and l <= L + T.  The report carries E_C, the vacuum companion
    E_B(l=0), and marks the vacuum distance bound not applicable.
    """
    cfg = cfg or QuadratureConfig()
    config = validate_assignment(gA, gB, geometry)
    geo = config.geometry
    _check_profile_geometry(profile, geo)
    report = _teleport_core(config, profile.shift, cfg, route_tol, "squeezed")
    e_c = squeeze_cost(profile, cfg=cfg)
    window = (-geo.d, geo.d)
    lo, hi = profile.activity_interval
    e_c_window = None
    if lo < window[0] or hi > window[1]:
        e_c_window = squeeze_cost(profile, window=window, cfg=cfg)
        if abs(e_c_window - e_c) <= 1e-12 * max(abs(e_c), 1e-300):
            e_c_window = None
    e_b_vacuum = moment_route_energy(config.gA, config.gB, geo, shift_l=0.0, cfg=cfg)
    return replace(
        report,
        E_C=e_c,
        E_C_window=e_c_window,
        E_B_vacuum=e_b_vacuum,
        flags={**report.flags, "profile": profile.to_dict()},
    )
