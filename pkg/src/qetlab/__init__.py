"""qetlab: numerics for vacuum-state and squeezed-state quantum energy
teleportation with a 1+1d chiral massless scalar field.

Natural units c = hbar = 1 throughout; energies carry inverse-length units.
"""

__version__ = "0.1.0"

from .backend import BACKEND
from .errors import (
    CoincidentPoints,
    ConfigError,
    DegenerateProfile,
    DivergentCost,
    GeometryViolation,
    KnotEvaluation,
    NonConvergence,
    NonFiniteFunctional,
    NumericalError,
    ParameterViolation,
    QetError,
    RouteMismatch,
    SingularKernel,
    SolverFailure,
    SupportViolation,
    ValidationError,
)
from .profiles import (
    CheckedConfiguration,
    ProtocolGeometry,
    SmearingProfile,
    compact_bump,
    fourier_power,
    fourier_transform,
    gaussian,
    gradient_norm,
    tabulated,
    validate_assignment,
)
from .quadrature import (
    QuadratureConfig,
    integrate_1d,
    integrate_2d,
    integrate_2d_iterated,
    integrate_frequency,
)
from .squeeze import (
    SqueezeProfile,
    identity_profile,
    make_piecewise_quadratic,
    profile_from_scale_factor,
    squeeze_cost,
    tabulated_profile,
)
from .vacuum import TeleportReport, teleported_energy
from .squeezed import teleported_energy_squeezed
from .scans import ScanPolicy, ScanResult, run_scan
from .bounds import SamplingFunction, certify_bound, flanagan_functional, minimize_flanagan
from .oracle import ModeGrid, compare_protocol, oracle_energy, oracle_moments

__all__ = [
    "BACKEND",
    "__version__",
    "CheckedConfiguration",
    "CoincidentPoints",
    "ConfigError",
    "DegenerateProfile",
    "DivergentCost",
    "GeometryViolation",
    "KnotEvaluation",
    "ModeGrid",
    "NonConvergence",
    "NonFiniteFunctional",
    "NumericalError",
    "ParameterViolation",
    "ProtocolGeometry",
    "QetError",
    "QuadratureConfig",
    "RouteMismatch",
    "SamplingFunction",
    "ScanPolicy",
    "ScanResult",
    "SingularKernel",
    "SmearingProfile",
    "SolverFailure",
    "SqueezeProfile",
    "SupportViolation",
    "TeleportReport",
    "ValidationError",
    "certify_bound",
    "compact_bump",
    "compare_protocol",
    "flanagan_functional",
    "fourier_power",
    "fourier_transform",
    "gaussian",
    "gradient_norm",
    "identity_profile",
    "integrate_1d",
    "integrate_2d",
    "integrate_2d_iterated",
    "integrate_frequency",
    "make_piecewise_quadratic",
    "minimize_flanagan",
    "oracle_energy",
    "oracle_moments",
    "profile_from_scale_factor",
    "run_scan",
    "squeeze_cost",
    "tabulated",
    "tabulated_profile",
    "teleported_energy",
    "teleported_energy_squeezed",
    "validate_assignment",
]
