"""Command-line surface.

Subcommands: vacuum, squeezed, scan, bound, oracle-compare,
profile-inspect.  Reports are JSON, curves are CSV; the column orders and
key names documented in the README are the compatibility contract.

Exit codes: 0 success, 1 validation failure (the message names the
violated invariant), 2 numerical failure (RouteMismatch, NonConvergence,
oracle disagreement).  Failures print a machine-parsable JSON object
{"error": ..., "message": ...} on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bounds import certify_bound, flanagan_functional, minimize_flanagan, quadratic_optimal
from .config import RunManifest, load_document, parse_run_config
from .errors import NumericalError, QetError, ValidationError
from .oracle import compare_protocol, suggest_mode_grid
from .profiles import ProtocolGeometry, validate_assignment
from .scans import ScanPolicy, run_scan
from .squeeze import density_curve, density_integral, squeeze_cost
from .squeezed import teleported_energy_squeezed
from .vacuum import teleported_energy

_SCAN_MODES = {
    "vacuum": "vacuum",
    "squeezed-fixed": "squeezed_fixed_l",
    "squeezed-tracking": "squeezed_tracking",
}


def _jsonify(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON serializable: {type(v)}")


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, default=_jsonify)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, np.floating):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return v


def cmd_vacuum(args) -> int:
    doc = load_document(args.config)
    run = parse_run_config(doc, require_profile=False)
    report = teleported_energy(run.gA, run.gB, run.geometry, cfg=run.quadrature)
    config = validate_assignment(run.gA, run.gB, run.geometry)
    payload = {
        "report": report.to_dict(),
        "certification": certify_bound(report, config.geometry),
        "manifest": RunManifest.create(args.config, doc, [args.output]).to_dict(),
    }
    _write_json(args.output, payload)
    return 0


def cmd_squeezed(args) -> int:
    doc = load_document(args.config)
    run = parse_run_config(doc, require_profile=True)
    report = teleported_energy_squeezed(
        run.gA, run.gB, run.geometry, run.profile, cfg=run.quadrature
    )
    config = validate_assignment(run.gA, run.gB, run.geometry)
    payload = {
        "report": report.to_dict(),
        "certification": certify_bound(report, config.geometry),
        "manifest": RunManifest.create(args.config, doc, [args.output]).to_dict(),
    }
    _write_json(args.output, payload)
    return 0


def cmd_scan(args) -> int:
    if args.param != "L":
        raise ValidationError(f"only --param L is supported (got {args.param!r})")
    doc = load_document(args.config)
    run = parse_run_config(doc)
    mode = _SCAN_MODES[args.mode]
    policy = ScanPolicy(
        mode=mode,
        l_fixed=args.l if mode == "squeezed_fixed_l" else None,
        margin_c0=args.margin if mode == "squeezed_tracking" else None,
    )
    if mode == "squeezed_fixed_l" and args.l is None:
        raise ValidationError("--mode squeezed-fixed requires --l")
    grid = np.geomspace(args.from_, args.to, args.points)
    result = run_scan(
        run.gA, run.gB, grid, T=run.geometry.T, policy=policy, cfg=run.quadrature
    )
    if mode == "vacuum":
        header = ["L", "E_A", "E_B", "bound_ratio"]
        rows = [
            (L, result.E_A, eb, br)
            for L, eb, br in zip(result.L, result.E_B, result.bound_ratio)
        ]
    else:
        header = ["L", "l", "E_A", "E_C", "E_Bf", "bound_ratio", "slope_window"]
        rows = [
            (L, l, result.E_A, ec, eb, br, sw)
            for L, l, ec, eb, br, sw in zip(
                result.L,
                result.shift_l,
                result.E_C,
                result.E_B,
                result.bound_ratio,
                result.rolling_slope,
            )
        ]
    _write_csv(args.output, header, rows)
    summary = {
        "mode": args.mode,
        "slope": result.slope,
        "slope_halfwidth": result.slope_halfwidth,
        "slope_variable": result.slope_variable,
        "tail_points": int(np.sum(result.tail_mask)),
        "flags": result.flags,
        "manifest": RunManifest.create(
            args.config, doc, [args.output] + ([args.summary] if args.summary else [])
        ).to_dict(),
    }
    if args.summary:
        _write_json(args.summary, summary)
    print(
        f"fitted tail slope: {result.slope:+.4f} +- {result.slope_halfwidth:.4f} "
        f"(vs {result.slope_variable})",
        file=sys.stderr,
    )
    return 0


def cmd_bound(args) -> int:
    if args.L <= 0:
        raise ValidationError("--L must be positive")
    # Canonical geometry with the requested separation; plateau width L.
    geo = ProtocolGeometry(-2.0 * args.L, -args.L, 0.0, args.L, T=args.T)
    xi, value = minimize_flanagan(geo, args.tail, args.grid)
    payload = {
        "L": args.L,
        "T": args.T,
        "grid_points": args.grid,
        "tail_length": args.tail,
        "minimum": value,
        "closed_form_infimum": 1.0 / (12.0 * math.pi * args.L),
        "tail_correction_factor": 1.0 + args.L / args.tail,
        "functional_consistency": flanagan_functional(xi),
        "manifest": RunManifest.create(
            "(args)", {"L": args.L, "T": args.T}, [args.output or "-"]
        ).to_dict(),
    }
    _write_json(args.output, payload)
    if args.csv:
        _write_csv(args.csv, ["x", "xi"], list(zip(xi.grid, xi.values)))
    return 0


def cmd_oracle_compare(args) -> int:
    doc = load_document(args.config)
    run = parse_run_config(doc)
    corrupt = float(os.environ.get("QET_ORACLE_CORRUPT", "0") or 0.0)
    grid = None
    if args.epsilon:
        grid = suggest_mode_grid(
            run.gA, run.gB, run.geometry, run.profile, epsilon=args.epsilon
        )
    report = compare_protocol(
        run.gA,
        run.gB,
        run.geometry,
        profile=run.profile,
        grid=grid,
        cfg=run.quadrature,
        tolerance=args.tolerance,
        corrupt_damping=corrupt,
    )
    report["manifest"] = RunManifest.create(
        args.config, doc, [args.output or "-"]
    ).to_dict()
    _write_json(args.output, report)
    if not report["all_pass"]:
        raise NumericalError("oracle comparison failed (see report)")
    return 0


def cmd_profile_inspect(args) -> int:
    doc = load_document(args.config)
    run = parse_run_config(doc, require_profile=True)
    profile = run.profile
    xs, dens = density_curve(profile, n=args.points)
    fs = profile.f(xs)
    _write_csv(args.output, ["x", "f", "density"], list(zip(xs, fs, dens)))
    e_c = squeeze_cost(profile, cfg=run.quadrature)
    parts = density_integral(profile, cfg=run.quadrature)
    payload = {
        "profile": profile.to_dict(),
        "E_C": e_c,
        "density_integral_pointwise": parts["pointwise"],
        "knot_masses": [[x, m] for x, m in parts["knot_masses"]],
        "density_integral_total": parts["total"],
        "rel_diff_vs_E_C": abs(parts["total"] - e_c) / max(abs(e_c), 1e-300),
        "manifest": RunManifest.create(args.config, doc, [args.output]).to_dict(),
    }
    _write_json(None, payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qetlab",
        description="Vacuum- and squeezed-state quantum energy teleportation "
        "numerics (natural units, energies in inverse length).",
    )
    parser.add_argument("--version", action="version", version=f"qetlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vacuum", help="single vacuum-protocol run")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_vacuum)

    p = sub.add_parser("squeezed", help="single squeezed-protocol run")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_squeezed)

    p = sub.add_parser("scan", help="distance scan with tail-slope fit")
    p.add_argument("config")
    p.add_argument("--param", default="L")
    p.add_argument("--from", dest="from_", type=float, required=True)
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument(
        "--mode", choices=sorted(_SCAN_MODES), default="vacuum"
    )
    p.add_argument("--l", type=float, default=None, help="fixed shift l")
    p.add_argument("--margin", type=float, default=None, help="tracking margin c0")
    p.add_argument("-o", "--output", required=True, help="CSV path")
    p.add_argument("--summary", default=None, help="summary JSON path")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bound", help="Flanagan-bound minimization")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--T", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=10000)
    p.add_argument("--tail", type=float, default=1000.0)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--csv", default=None, help="export the minimizer as CSV")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("oracle-compare", help="mode-sum oracle cross-check")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--epsilon", type=float, default=None, help="oracle damping")
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("profile-inspect", help="squeeze profile curve and cost")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True, help="CSV path")
    p.add_argument("--points", type=int, default=513)
    p.set_defaults(func=cmd_profile_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _emit_error(exc)
        return 1
    except NumericalError as exc:
        _emit_error(exc)
        return 2
    except QetError as exc:  # pragma: no cover - base-class safety net
        _emit_error(exc)
        return 2


def _emit_error(exc) -> None:
    print(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}),
        file=sys.stderr,
    )


if __name__ == "__main__":
    sys.exit(main())
