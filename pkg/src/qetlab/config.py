"""Run documents (TOML or JSON) and the reproducibility manifest.

One document describes one run::

    [geometry]
    x1A = -21.0
    x2A = -5.0
    x1B = 5.0
    x2B = 21.0
    T = 1.0            # optional, default 0

    [gA]               # and likewise [gB]
    family = "gaussian"          # gaussian | compact_bump | tabulated
    center = -13.0
    sigma = 1.0                  # width parameter for both families
    amplitude = 1.0              # optional, default 1
    # table = [[x, y], ...]      # tabulated family instead of the above

    [f]                # optional; present only for squeezed runs
    kind = "piecewise_quadratic" # identity | piecewise_quadratic |
                                 # tabulated | scale_factor
    lambda = 0.02
    xbar = 5.0
    d = 10.0
    # table = [[x, f], ...]          (kind = tabulated)
    # scale_table = [[x, a], ...]    (kind = scale_factor)

    [quadrature]       # optional overrides
    rel_tol = 1e-10
    abs_tol = 1e-14

The format is detected by file extension (.toml / .json).  Every emitted
report embeds the resolved configuration through :class:`RunManifest`;
with SOURCE_DATE_EPOCH set, outputs are byte-identical for identical
inputs and version.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__, backend
from .errors import ConfigError
from .profiles import ProtocolGeometry, SmearingProfile, compact_bump, gaussian, tabulated
from .quadrature import QuadratureConfig
from .squeeze import (
    SqueezeProfile,
    identity_profile,
    make_piecewise_quadratic,
    profile_from_scale_factor,
    tabulated_profile,
)


@dataclass(frozen=True)
class RunConfig:
    gA: SmearingProfile
    gB: SmearingProfile
    geometry: ProtocolGeometry
    profile: SqueezeProfile | None
    quadrature: QuadratureConfig
    document: dict


def load_document(path) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            return tomllib.loads(raw.decode("utf-8"))
        if suffix == ".json":
            return json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    raise ConfigError(f"unknown config extension {suffix!r} (use .toml or .json)")


def _require(doc, key, where):
    if key not in doc:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return doc[key]


def _parse_profile(section, name) -> SmearingProfile:
    if "table" in section:
        table = section["table"]
        try:
            xs = [row[0] for row in table]
            ys = [row[1] for row in table]
        except (TypeError, IndexError) as exc:
            raise ConfigError(f"[{name}] table must be [[x, y], ...]") from exc
        return tabulated(xs, ys)
    family = section.get("family", "gaussian")
    center = float(_require(section, "center", name))
    sigma = float(_require(section, "sigma", name))
    amplitude = float(section.get("amplitude", 1.0))
    if family == "gaussian":
        return gaussian(center, sigma, amplitude)
    if family == "compact_bump":
        return compact_bump(center, sigma, amplitude)
    raise ConfigError(f"[{name}] unknown family {family!r}")


def _parse_squeeze(section) -> SqueezeProfile:
    kind = section.get("kind", "identity")
    if kind == "identity":
        return identity_profile()
    if kind == "piecewise_quadratic":
        return make_piecewise_quadratic(
            float(_require(section, "lambda", "f")),
            float(_require(section, "xbar", "f")),
            float(_require(section, "d", "f")),
        )
    if kind == "tabulated":
        table = _require(section, "table", "f")
        xs = [row[0] for row in table]
        fs = [row[1] for row in table]
        return tabulated_profile(xs, fs, half_width=section.get("d"))
    if kind == "scale_factor":
        table = _require(section, "scale_table", "f")
        xs = [row[0] for row in table]
        vals = [row[1] for row in table]
        return profile_from_scale_factor((xs, vals))
    raise ConfigError(f"[f] unknown kind {kind!r}")


def _parse_quadrature(section) -> QuadratureConfig:
    known = {
        "rel_tol",
        "abs_tol",
        "max_subdivisions",
        "freq_cutoff",
        "epsilon_regulator",
        "grid_points",
    }
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"[quadrature] unknown keys {sorted(unknown)}")
    return QuadratureConfig(**section)


def parse_run_config(doc: dict, require_profile=None) -> RunConfig:
    """Build the validated run objects from a parsed document.

    ``require_profile``: True demands an [f] section (squeezed runs),
    False forbids one (vacuum runs), None accepts either.
    """
    if "geometry" not in doc:
        raise ConfigError("missing [geometry] section")
    geom = doc["geometry"]
    geometry = ProtocolGeometry(
        float(_require(geom, "x1A", "geometry")),
        float(_require(geom, "x2A", "geometry")),
        float(_require(geom, "x1B", "geometry")),
        float(_require(geom, "x2B", "geometry")),
        float(geom.get("T", 0.0)),
    )
    if "gA" not in doc or "gB" not in doc:
        raise ConfigError("missing [gA] or [gB] section")
    gA = _parse_profile(doc["gA"], "gA")
    gB = _parse_profile(doc["gB"], "gB")
    profile = None
    if "f" in doc:
        if require_profile is False:
            raise ConfigError(
                "mode/config mismatch: [f] (squeeze profile) present in a "
                "vacuum-mode run"
            )
        profile = _parse_squeeze(doc["f"])
    elif require_profile is True:
        raise ConfigError("mode/config mismatch: squeezed run needs an [f] section")
    quad = _parse_quadrature(doc.get("quadrature", {}))
    return RunConfig(gA, gB, geometry, profile, quad, doc)


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(tz=timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record embedded in every report."""

    input_path: str
    resolved_config: dict
    version: str
    backend: str
    timestamp: str
    outputs: tuple

    @classmethod
    def create(cls, input_path, resolved_config, outputs=()):
        return cls(
            input_path=str(input_path),
            resolved_config=resolved_config,
            version=__version__,
            backend=backend.BACKEND,
            timestamp=_timestamp(),
            outputs=tuple(str(o) for o in outputs),
        )

    def to_dict(self) -> dict:
        return {
            "input_path": self.input_path,
            "resolved_config": self.resolved_config,
            "version": self.version,
            "backend": self.backend,
            "timestamp": self.timestamp,
            "outputs": list(self.outputs),
        }
